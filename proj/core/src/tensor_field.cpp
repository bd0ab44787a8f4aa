#include "gkflow/tensor_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gkflow {

std::string to_string(Symmetry s) {
  switch (s) {
    case Symmetry::Symmetric: return "symmetric";
    case Symmetry::Antisymmetric: return "antisymmetric";
    default: return "none";
  }
}

Symmetry symmetry_from_string(const std::string& s) {
  if (s == "symmetric") return Symmetry::Symmetric;
  if (s == "antisymmetric") return Symmetry::Antisymmetric;
  if (s == "none") return Symmetry::None;
  throw std::invalid_argument("unknown symmetry flag: " + s);
}

TensorField::TensorField(BackendPtr backend, std::vector<Index> slots, Symmetry symmetry)
    : backend_(std::move(backend)), slots_(std::move(slots)), symmetry_(symmetry) {
  if (!backend_) throw std::invalid_argument("tensor field: null backend");
  dim_ = backend_->dim();
  npts_ = backend_->num_points();
  ncomp_ = 1;
  for (std::size_t r = 0; r < slots_.size(); ++r) ncomp_ *= static_cast<std::size_t>(dim_);
  if (symmetry_ != Symmetry::None) {
    for (Index s : slots_)
      if (s != slots_.front()) throw std::invalid_argument("tensor field: symmetry needs uniform slots");
  }
  data_.assign(ncomp_ * npts_, 0.0);
}

TensorField TensorField::form(BackendPtr b, int degree) {
  if (degree < 0) throw std::invalid_argument("form degree must be non-negative");
  if (degree > b->dim()) throw std::invalid_argument("form degree exceeds dimension");
  return TensorField(std::move(b), std::vector<Index>(degree, Index::Lower),
                     degree >= 2 ? Symmetry::Antisymmetric : Symmetry::None);
}

bool TensorField::is_form() const {
  for (Index s : slots_)
    if (s != Index::Lower) return false;
  return rank() < 2 || symmetry_ == Symmetry::Antisymmetric;
}

std::size_t TensorField::flat(std::initializer_list<int> idx) const {
  return flat(std::span<const int>(idx.begin(), idx.size()));
}

std::size_t TensorField::flat(std::span<const int> idx) const {
  std::size_t f = 0;
  for (int i : idx) f = f * dim_ + i;
  return f;
}

void TensorField::unflatten(std::size_t comp, std::span<int> idx) const {
  for (int r = rank() - 1; r >= 0; --r) {
    idx[r] = static_cast<int>(comp % dim_);
    comp /= dim_;
  }
}

bool TensorField::same_shape(const TensorField& o) const {
  return backend_ == o.backend_ && slots_ == o.slots_;
}

TensorField TensorField::rebind(BackendPtr backend) const {
  if (!backend || backend->dim() != dim_ || backend->num_points() != npts_)
    throw std::invalid_argument("tensor field: rebind to an incompatible backend");
  TensorField out = *this;
  out.backend_ = std::move(backend);
  return out;
}

TensorField& TensorField::operator+=(const TensorField& o) { return axpy(1.0, o); }
TensorField& TensorField::operator-=(const TensorField& o) { return axpy(-1.0, o); }

TensorField& TensorField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

TensorField& TensorField::axpy(double s, const TensorField& o) {
  if (!same_shape(o)) throw std::invalid_argument("tensor field: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
  return *this;
}

void TensorField::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void TensorField::enforce_symmetry() {
  if (symmetry_ == Symmetry::None || rank() < 2) return;
  const int k = rank();
  const auto& perms = permutations(k);
  const bool anti = symmetry_ == Symmetry::Antisymmetric;
  const double inv = 1.0 / static_cast<double>(perms.size());
  std::vector<double> out(ncomp_);
  std::vector<int> idx(k), pidx(k);
  for (std::size_t p = 0; p < npts_; ++p) {
    double* v = &data_[p * ncomp_];
    for (std::size_t c = 0; c < ncomp_; ++c) {
      unflatten(c, idx);
      double acc = 0.0;
      for (const auto& perm : perms) {
        for (int r = 0; r < k; ++r) pidx[r] = idx[perm.map[r]];
        acc += (anti ? perm.sign : 1) * v[flat(pidx)];
      }
      out[c] = acc * inv;
    }
    std::copy(out.begin(), out.end(), v);
  }
}

double TensorField::symmetry_defect() const {
  if (symmetry_ == Symmetry::None || rank() < 2) return 0.0;
  TensorField t = *this;
  t.enforce_symmetry();
  return max_difference(t, *this);
}

double TensorField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool TensorField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
TensorField operator*(double s, TensorField a) { return a *= s; }

double max_difference(const TensorField& a, const TensorField& b) {
  if (a.components() != b.components() || a.num_points() != b.num_points()) {
    throw std::invalid_argument("max_difference: shape mismatch");
  }
  double m = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

const std::vector<Permutation>& permutations(int k) {
  static std::mutex mu;
  static std::map<int, std::vector<Permutation>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  std::vector<Permutation> out;
  std::vector<int> p(k);
  for (int i = 0; i < k; ++i) p[i] = i;
  do {
    int inversions = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (p[i] > p[j]) ++inversions;
    out.push_back({p, inversions % 2 == 0 ? 1 : -1});
  } while (std::next_permutation(p.begin(), p.end()));
  return cache.emplace(k, std::move(out)).first->second;
}

}  // namespace gkflow
