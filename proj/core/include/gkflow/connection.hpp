#pragma once

#include "gkflow/metric.hpp"
#include "gkflow/tensor_field.hpp"

namespace gkflow {

/// Connection coefficients stored as Γ[i][j][k] = Γ^k_{ij}, with
/// D_{e_i} e_j = Γ^k_{ij} e_k. Slots (Lower, Lower, Upper).
TensorField levi_civita(const Metric& g);

/// Torsion-free reference connection: zero on the torus, ½c on a group.
TensorField reference_connection(const BackendPtr& backend);

/// Torsion Γ^k_{ij} − Γ^k_{ji} − c^k_{ij}.
TensorField torsion(const TensorField& gamma);

/// D T with the derivative slot prepended: (DT)[p][...] = D_{e_p} T[...].
TensorField covariant_derivative(const TensorField& gamma, const TensorField& t);
TensorField covariant_derivative(const Metric& g, const TensorField& t);

/// R[i][j][k][l] = R_{ijk}^l with (D_i D_j − D_j D_i − D_{[e_i,e_j]}) e_k = R_{ijk}^l e_l.
TensorField riemann_from_connection(const TensorField& gamma);
TensorField riemann(const Metric& g);

/// Rc_{jk} = R_{ijk}^i (raw contraction; symmetric only up to discretization).
TensorField ricci_from_riemann(const TensorField& rm);
/// Rc with the trace term ∂_jΓ^i_{ik} evaluated as ∂_j∂_k log√det g on the
/// torus: symmetric by construction, equal to the raw contraction up to
/// discretization error (identical on a group).
TensorField ricci(const Metric& g);
TensorField scalar_curvature(const Metric& g);

struct CurvatureInvariants {
  TensorField scal;      ///< g^{jk} Rc_{jk}
  TensorField rc_norm2;  ///< |Rc|²
  TensorField rm_norm2;  ///< |Rm|² = R_{ijkl} R^{ijkl}
};
CurvatureInvariants curvature_invariants(const Metric& g);

/// Metric-free Lie derivative, evaluated with the reference connection.
TensorField lie_derivative(const TensorField& x, const TensorField& t);

/// H²_{ij} = H_{ipq} H_j^{pq}.
TensorField h_squared(const Metric& g, const TensorField& h);

/// X_g^k = g^{ij}(Γ^k_{ij} − Γ0^k_{ij}).
TensorField deturck_vector_field(const Metric& g, const TensorField& gamma0);

/// Point-wise symmetrization of a rank-2 field: ½(T_{ij} + T_{ji}).
TensorField symmetrize2(const TensorField& t);

}  // namespace gkflow
