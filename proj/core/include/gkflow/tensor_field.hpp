#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "gkflow/backend.hpp"

namespace gkflow {

/// Slot variance: Lower = covariant, Upper = contravariant.
enum class Index : unsigned char { Lower, Upper };

enum class Symmetry : unsigned char { None, Symmetric, Antisymmetric };

std::string to_string(Symmetry s);
Symmetry symmetry_from_string(const std::string& s);

/// Component array of a tensor field over a backend.
///
/// Storage is point-major, then the index tuple in row-major order (slot 0
/// most significant). The declared symmetry applies to all slots and is
/// enforced only by `enforce_symmetry()`; nothing assumes it implicitly.
class TensorField {
 public:
  TensorField() = default;
  TensorField(BackendPtr backend, std::vector<Index> slots, Symmetry symmetry = Symmetry::None);

  static TensorField scalar(BackendPtr b) { return TensorField(std::move(b), {}); }
  static TensorField vector(BackendPtr b) { return TensorField(std::move(b), {Index::Upper}); }
  static TensorField form(BackendPtr b, int degree);
  /// (1,1) tensor J_k^l: first slot lower, second upper.
  static TensorField endomorphism(BackendPtr b) {
    return TensorField(std::move(b), {Index::Lower, Index::Upper});
  }
  static TensorField symmetric2(BackendPtr b) {
    return TensorField(std::move(b), {Index::Lower, Index::Lower}, Symmetry::Symmetric);
  }

  const BackendPtr& backend() const { return backend_; }
  bool empty() const { return !backend_; }
  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<Index>& slots() const { return slots_; }
  Symmetry symmetry() const { return symmetry_; }
  void set_symmetry(Symmetry s) { symmetry_ = s; }
  bool is_form() const;
  std::size_t components() const { return ncomp_; }
  std::size_t num_points() const { return npts_; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> at(std::size_t point) { return {data_.data() + point * ncomp_, ncomp_}; }
  std::span<const double> at(std::size_t point) const {
    return {data_.data() + point * ncomp_, ncomp_};
  }
  double& operator()(std::size_t point, std::size_t comp) { return data_[point * ncomp_ + comp]; }
  double operator()(std::size_t point, std::size_t comp) const { return data_[point * ncomp_ + comp]; }

  std::size_t flat(std::initializer_list<int> idx) const;
  std::size_t flat(std::span<const int> idx) const;
  void unflatten(std::size_t comp, std::span<int> idx) const;

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);
  /// this += s * o
  TensorField& axpy(double s, const TensorField& o);
  void fill(double v);

  /// Projects onto the declared symmetry class (exact by construction).
  void enforce_symmetry();
  /// Largest deviation from the declared symmetry.
  double symmetry_defect() const;

  double max_abs() const;
  bool all_finite() const;
  bool same_shape(const TensorField& o) const;
  /// Same components on another backend with an identical sample layout.
  TensorField rebind(BackendPtr backend) const;

 private:
  BackendPtr backend_;
  std::vector<Index> slots_;
  Symmetry symmetry_ = Symmetry::None;
  int dim_ = 0;
  std::size_t ncomp_ = 1;
  std::size_t npts_ = 0;
  std::vector<double> data_;
};

TensorField operator+(TensorField a, const TensorField& b);
TensorField operator-(TensorField a, const TensorField& b);
TensorField operator*(double s, TensorField a);

/// max over points and components of |a - b|
double max_difference(const TensorField& a, const TensorField& b);

/// Permutation support for small ranks (used for antisymmetrization).
struct Permutation {
  std::vector<int> map;
  int sign;
};
const std::vector<Permutation>& permutations(int k);

}  // namespace gkflow
