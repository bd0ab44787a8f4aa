#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "gkflow/tensor_field.hpp"

namespace gkflow {

/// Raised when a metric fails positive-definiteness at some sample point.
class DegenerateMetricError : public std::runtime_error {
 public:
  DegenerateMetricError(std::size_t point, double eigenvalue);
  std::size_t point() const { return point_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  std::size_t point_;
  double eigenvalue_;
};

/// Riemannian metric g_{ij} with cached inverse and volume density.
/// Construction symmetrizes exactly and checks the smallest eigenvalue at
/// every sample point.
class Metric {
 public:
  Metric() = default;
  explicit Metric(TensorField g);

  /// Identity components on the torus, the reference frame metric on a group.
  static Metric reference(const BackendPtr& backend);

  const TensorField& tensor() const { return g_; }
  const TensorField& inverse() const { return inv_; }
  /// sqrt(det g) per point
  const TensorField& volume_density() const { return sqrt_det_; }
  const BackendPtr& backend() const { return g_.backend(); }
  int dim() const { return g_.dim(); }
  std::size_t num_points() const { return g_.num_points(); }

  double min_eigenvalue() const { return min_eig_; }
  /// max over points of the largest eigenvalue of g^{-1}
  double max_inverse_eigenvalue() const { return max_inv_eig_; }
  /// max |g g^{-1} - I|
  double inverse_defect() const;

 private:
  TensorField g_;
  TensorField inv_;
  TensorField sqrt_det_;
  double min_eig_ = 0.0;
  double max_inv_eig_ = 0.0;
};

/// X^i -> X_i = g_{ij} X^j
TensorField lower_vector(const Metric& g, const TensorField& x);
/// a_i -> a^i = g^{ij} a_j
TensorField raise_one_form(const Metric& g, const TensorField& a);

}  // namespace gkflow
