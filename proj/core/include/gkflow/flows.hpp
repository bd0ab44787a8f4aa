#pragma once

#include "gkflow/complex_structure.hpp"
#include "gkflow/metric.hpp"
#include "gkflow/tensor_field.hpp"

namespace gkflow {

/// ∂g = −2Rc + ½H², ∂H = Δ_d H.
struct BFieldDerivative {
  TensorField dg;
  TensorField dh;
};
BFieldDerivative bfield_rhs(const Metric& g, const TensorField& h);

/// Summands of the J-evolution ∂J = ΔJ + R(J) + Q(DJ):
/// ΔJ = g^{st} D_s D_t J, R(J) = [J, g^{-1}Rc] with
/// [J, A]_k^l = J_k^p A_p^l − A_k^p J_p^l, and the quadratic term
/// Q(DJ)_k^l = − J_k^p D^sJ_i^l D_pJ_s^i − J_i^l D^sJ_k^p D_pJ_s^i
///             + J_s^p D^sJ_i^l D_pJ_k^i + J_i^l D^sJ_s^p D_pJ_k^i
///             − J_p^l D_kJ_t^p V^t + J_k^p D_pJ_t^l V^t − J_t^p V^t D_pJ_k^l,
/// V^t = D^sJ_s^t.
struct JFlowTerms {
  TensorField laplacian;
  TensorField curvature;
  TensorField quadratic;
  TensorField total() const;
};
JFlowTerms j_rhs_terms(const Metric& g, const TensorField& j);
TensorField j_rhs(const Metric& g, const TensorField& j);

/// Derivative of the coupled state (g, H, J₊, J₋).
struct GKDerivative {
  TensorField dg;
  TensorField dh;
  TensorField dj_plus;
  TensorField dj_minus;
};
GKDerivative gk_coupled_rhs(const GKState& s);

/// The coupled system with the DeTurck term L_{X_g}(·) added to every
/// component, X_g^k = g^{ij}(Γ^k_{ij} − Γ0^k_{ij}). An empty `gamma0`
/// selects the reference connection of the backend.
GKDerivative deturck_gauge_rhs(const GKState& s, const TensorField& gamma0 = TensorField());

/// Pluriclosed flow ∂ω = (dd*ω)^{1,1} − ρ_C, with ρ_C the Chern–Ricci form.
/// On Kähler input this is −ρ. Its metric part equals
/// ½(−2Rc + ½H²) − ½ L_X g for H = d^cω and X the gauge field.
struct PluriclosedOptions {
  double integrability_tol = 1e-5;
  double pluriclosed_tol = 1e-5;
  bool check = true;
};
TensorField pluriclosed_rhs(const Metric& g, const TensorField& j, const PluriclosedOptions& opt = {});

/// ∂g corresponding to a J-invariant ∂ω: ∂g_{ij} = ∂ω_{ip} J_j^p.
TensorField metric_rate_from_form_rate(const TensorField& domega, const TensorField& j);

}  // namespace gkflow
