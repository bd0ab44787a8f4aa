#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gkflow/tensor_field.hpp"

namespace gkflow {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-dependent vector field X(t, x) with its Jacobian ∂_j X^i.
/// On a group backend x is ignored and the Jacobian is unused.
class TimeDependentField {
 public:
  virtual ~TimeDependentField() = default;
  virtual int dim() const = 0;
  /// value[i] = X^i, jac[i*dim + j] = ∂_j X^i (jac may be empty).
  virtual void evaluate(double t, std::span<const double> x, std::span<double> value,
                        std::span<double> jac) const = 0;
  /// Torus axes along which X varies; particles differing only in other
  /// coordinates move identically.
  virtual std::vector<int> active_axes() const;
};

/// Axes along which a torus field varies by more than rel_tol·max|t|
/// (spectral derivatives leave roundoff along constant directions).
std::vector<int> active_axes(const TensorField& t, double rel_tol = 1e-12);

/// Grid samples X(t_k) interpolated by cubic Lagrange polynomials in time
/// (four nearest samples) and trigonometric polynomials in space.
class SampledVectorField : public TimeDependentField {
 public:
  SampledVectorField(std::vector<double> times, std::vector<TensorField> samples, double scale = 1.0);
  int dim() const override { return dim_; }
  void evaluate(double t, std::span<const double> x, std::span<double> value,
                std::span<double> jac) const override;
  std::vector<int> active_axes() const override { return active_; }
  const BackendPtr& backend() const { return samples_.front().backend(); }
  double scale() const { return scale_; }

 private:
  std::vector<double> times_;
  std::vector<TensorField> samples_;
  double scale_;
  int dim_;
  std::vector<int> active_;
};

/// Off-grid trigonometric interpolation of every component of a torus field
/// at coordinate x, restricted to the given active axes.
void interpolate_components(const TensorField& f, std::span<const double> x, const std::vector<int>& axes,
                            std::span<double> value, std::span<double> grad = {});

/// Sampled flow map φ_t with its Jacobian.
///
/// Torus: positions φ_t(x) (unwrapped coordinates) and dφ^a/dx^i for every
/// grid point. Group: φ_t is right translation by a(t) with ȧ = a X(t); its
/// differential in the invariant frame is M(t) = Ad(a(t)^{-1}), M' = −ad_X M.
class DiffeoFlow {
 public:
  DiffeoFlow(BackendPtr backend, std::vector<double> times);

  const BackendPtr& backend() const { return backend_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t num_times() const { return times_.size(); }
  int dim() const { return backend_->dim(); }

  /// φ(x_p) at sample k, `dim` values (torus only).
  std::span<const double> position(std::size_t k, std::size_t p) const;
  std::span<double> position(std::size_t k, std::size_t p);
  /// (dφ)^a_i at sample k, stored [a*dim + i].
  std::span<const double> jacobian(std::size_t k, std::size_t p) const;
  std::span<double> jacobian(std::size_t k, std::size_t p);
  /// Active axes of the generating field (torus).
  const std::vector<int>& active_axes() const { return active_; }
  void set_active_axes(std::vector<int> a) { active_ = std::move(a); }

  double min_jacobian_determinant() const;
  /// Largest step-doubling error estimate seen during integration.
  double max_step_error() const { return max_step_error_; }
  void set_max_step_error(double e) { max_step_error_ = e; }

 private:
  BackendPtr backend_;
  std::vector<double> times_;
  std::size_t per_point_ = 0;
  std::vector<std::vector<double>> pos_;
  std::vector<std::vector<double>> jac_;
  std::vector<int> active_;
  double max_step_error_ = 0.0;
};

struct DiffeoOptions {
  int substeps = 1;             ///< RK4 steps per sample interval
  bool error_check = true;      ///< step-doubling estimate on a particle subset
  double error_bound = 1e-6;    ///< abort threshold, in units of the smallest grid spacing
  std::size_t store_stride = 1; ///< keep every k-th time sample (the last is always kept)
};

/// Integrates dφ/dt = X(t, φ), d(dφ)/dt = ∂X(t, φ)·dφ from φ_{t0} = Id by RK4.
DiffeoFlow integrate_diffeo(const TimeDependentField& x, const BackendPtr& backend, const std::vector<double>& times,
                            const DiffeoOptions& opt = {});

/// (φ*T) at stored sample k: covariant slots transform with dφ, contravariant
/// slots with dφ^{-1}, values taken at φ(x) by trigonometric interpolation.
TensorField pullback(const DiffeoFlow& phi, std::size_t k, const TensorField& t);

/// Pullback by a single flow map given as position/Jacobian arrays (used by
/// composition checks).
TensorField pullback_by_map(const BackendPtr& backend, const std::vector<double>& positions,
                            const std::vector<double>& jacobians, const std::vector<int>& map_axes,
                            const TensorField& t);

}  // namespace gkflow
