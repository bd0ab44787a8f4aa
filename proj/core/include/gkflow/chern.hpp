#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gkflow/metric.hpp"
#include "gkflow/tensor_field.hpp"

namespace gkflow {

/// Real Chern connection of a Hermitian pair (g, J):
/// g(∇_X Y, Z) = g(D_X Y, Z) − ½ dω(JX, Y, Z), coefficients stored like
/// levi_civita (Γ[i][j][k] = Γ^k_{ij}).
TensorField chern_connection(const Metric& g, const TensorField& j);

/// Chern–Ricci form ρ(X,Y) = ½ tr(J ∘ R^C(X,Y)); equals Rc(J·,·) when
/// (g, J) is Kähler.
TensorField chern_ricci_form(const Metric& g, const TensorField& j);

/// Unitary basis v_1..v_m (m = dim/2) of the +i eigenspace of J at one
/// point, as columns. Built from the projector ½(1 − iJ) by Gram–Schmidt
/// with largest-norm pivoting; each column's largest component is made
/// real and positive.
Eigen::MatrixXcd unitary_frame(std::span<const double> g, std::span<const double> j, int dim);

/// Chern data at one sample point in a unitary frame (so h_{k l̄} = δ).
struct ChernPoint {
  Eigen::MatrixXcd s;                    ///< S_{k l̄} = h^{i j̄} Ω_{i j̄ k l̄}
  Eigen::MatrixXcd q;                    ///< Q_{i j̄} = T_{i k n̄} conj(T_{j k n̄})
  std::vector<std::complex<double>> t;   ///< T_{i k n̄} at (i*m + k)*m + n
  double t_norm2 = 0.0;                  ///< sum over all index orders of |T|²
};

struct ChernQuantities {
  std::vector<ChernPoint> points;
  double torsion_antisymmetry_defect = 0.0;
  double q_hermitian_defect = 0.0;
  double q_min_eigenvalue = 0.0;
  /// max over points of |S − Q|
  double static_residual() const;
  /// max over points of |Q − ½|T|² h| (complex surfaces)
  double surface_identity_residual() const;
};

/// Throws IncompatibleStructureError if J is not integrable to `integrability_tol`.
/// `points` restricts the evaluation (and the integrability check) to the
/// listed samples; empty means all.
ChernQuantities chern_quantities(const Metric& g, const TensorField& j, double integrability_tol = 1e-5,
                                 std::span<const std::size_t> points = {});

}  // namespace gkflow
