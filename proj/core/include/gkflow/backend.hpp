#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace gkflow {

/// Periodic uniform grid on a flat torus. Fields sampled here are periodic
/// by construction: every neighbour lookup wraps.
///
/// `stencil_order` selects centred finite differences of order 2, 4, 6 or 8;
/// order 0 selects Fourier (trigonometric) differentiation, which is the
/// derivative of the same interpolant used for off-grid evaluation.
class TorusChart {
 public:
  TorusChart(std::vector<int> resolution, std::vector<double> periods,
             int stencil_order = 4);

  int dim() const { return static_cast<int>(resolution_.size()); }
  std::size_t num_points() const { return num_points_; }
  const std::vector<int>& resolution() const { return resolution_; }
  const std::vector<double>& periods() const { return periods_; }
  double spacing(int axis) const { return periods_[axis] / resolution_[axis]; }
  double min_spacing() const;
  double cell_volume() const;
  int stencil_order() const { return stencil_order_; }
  bool spectral() const { return stencil_order_ == 0; }

  /// A local patch is a small stencil grid around a point of R^n. Neighbour
  /// lookups still wrap, so after k derivative levels only points farther
  /// than k stencil half-widths from the edge are valid.
  bool local_patch() const { return local_patch_; }
  const std::vector<double>& origin() const { return origin_; }
  static TorusChart patch(std::vector<double> center, int half_points, double spacing, int stencil_order);

  /// Point-major linear index; axis 0 is the slowest.
  std::size_t stride(int axis) const { return strides_[axis]; }
  std::vector<int> multi_index(std::size_t point) const;
  std::vector<double> coordinates(std::size_t point) const;
  std::size_t shift(std::size_t point, int axis, int offset) const;

  /// d/dx^axis of `ncomp` interleaved component series.
  void differentiate(int axis, std::span<const double> in, std::span<double> out,
                     std::size_t ncomp) const;

  /// Largest modulus of the first-derivative symbol along `axis`.
  double max_wavenumber(int axis) const;

  /// One-dimensional trigonometric interpolation weights for the grid
  /// nodes of `axis` at coordinate `x` (any real, wrapped).
  void interpolation_weights(int axis, double x, std::span<double> w) const;
  /// Derivative of the interpolation weights with respect to `x`.
  void interpolation_weight_derivatives(int axis, double x, std::span<double> dw) const;

 private:
  std::vector<int> resolution_;
  std::vector<double> periods_;
  std::vector<std::size_t> strides_;
  std::size_t num_points_ = 0;
  int stencil_order_;
  bool local_patch_ = false;
  std::vector<double> origin_;
  std::vector<double> fd_weights_;              // offsets 1..p/2, antisymmetric
  std::vector<Eigen::MatrixXd> spectral_diff_;  // per axis when spectral
};

/// Left-invariant frame {e_i} of a Lie group with [e_i, e_j] = c^k_{ij} e_k.
/// Invariant tensors are position independent, so one sample point suffices
/// and every frame derivative of a component vanishes.
class FrameAlgebra {
 public:
  FrameAlgebra(int dim, std::vector<double> structure_constants,
               Eigen::MatrixXd frame_metric, std::string label = "custom");

  int dim() const { return dim_; }
  /// c^k_{ij}
  double c(int k, int i, int j) const {
    return structure_constants_[(k * dim_ + i) * dim_ + j];
  }
  const std::vector<double>& structure_constants() const { return structure_constants_; }
  const Eigen::MatrixXd& frame_metric() const { return frame_metric_; }
  const std::string& label() const { return label_; }

  double jacobi_residual() const;
  /// Matrix of ad_X in the frame: (ad_X)^k_j = X^i c^k_{ij}.
  Eigen::MatrixXd ad(std::span<const double> x) const;
  /// The same group seen through right-invariant fields: c -> -c.
  FrameAlgebra opposite() const;
  bool unimodular(double tol = 1e-12) const;

  /// su(2) with [e_1,e_2] = (2/r) e_3 cyclically; orthonormal frame of the
  /// round three-sphere of radius r.
  static FrameAlgebra su2(double radius = 1.0);
  /// su(2) + R, S^3 frame first, circle direction last; round product metric
  /// with circle length scale `circle` (|e_4| = circle).
  static FrameAlgebra su2_plus_r(double radius = 1.0, double circle = 1.0);
  static FrameAlgebra abelian(int dim);

 private:
  int dim_;
  std::vector<double> structure_constants_;
  Eigen::MatrixXd frame_metric_;
  std::string label_;
};

/// Discretization backend shared by every field. The calculus is written in
/// a global frame with constant brackets: coordinate frame on the torus
/// (brackets zero, derivatives by stencils) or invariant frame on a group
/// (brackets c^k_{ij}, derivatives zero).
class Backend {
 public:
  explicit Backend(TorusChart chart) : impl_(std::move(chart)) {}
  explicit Backend(FrameAlgebra algebra) : impl_(std::move(algebra)) {}

  bool is_torus() const { return std::holds_alternative<TorusChart>(impl_); }
  bool is_frame() const { return !is_torus(); }
  const TorusChart& torus() const { return std::get<TorusChart>(impl_); }
  const FrameAlgebra& frame() const { return std::get<FrameAlgebra>(impl_); }

  int dim() const;
  std::size_t num_points() const;
  double structure_constant(int k, int i, int j) const {
    return is_torus() ? 0.0 : frame().c(k, i, j);
  }
  bool has_brackets() const;
  /// Volume weight of one sample for quadrature (cell volume, or 1 on a group
  /// where integrals are reported per unit reference volume).
  double sample_volume() const;
  std::string describe() const;

 private:
  std::variant<TorusChart, FrameAlgebra> impl_;
};

using BackendPtr = std::shared_ptr<const Backend>;

BackendPtr make_torus(std::vector<int> resolution, std::vector<double> periods,
                      int stencil_order = 4);
BackendPtr make_frame(FrameAlgebra algebra);
/// Local patch of (2·half_points+1)^n points centred on `center`; the centre
/// is point num_points()/2.
BackendPtr make_patch(std::vector<double> center, int half_points, double spacing, int stencil_order = 4);

}  // namespace gkflow
