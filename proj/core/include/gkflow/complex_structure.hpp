#pragma once

#include <stdexcept>
#include <string>

#include "gkflow/metric.hpp"
#include "gkflow/tensor_field.hpp"

namespace gkflow {

/// Endomorphisms are (Lower, Upper) fields J[k][l] = J_k^l with
/// J(e_k) = J_k^l e_l. On a 1-form, (Jα)_k = J_k^l α_l.

class IncompatibleStructureError : public std::invalid_argument {
 public:
  IncompatibleStructureError(const std::string& what, double residual)
      : std::invalid_argument(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

TensorField identity_endomorphism(const BackendPtr& b);
/// (A∘B)_k^l = B_k^p A_p^l
TensorField compose(const TensorField& a, const TensorField& b);
/// [A, B] = A∘B − B∘A
TensorField commutator(const TensorField& a, const TensorField& b);
/// Raises the second slot of a covariant 2-tensor: (g^{-1}T)_k^l = T_{kp} g^{pl}.
TensorField as_endomorphism(const Metric& g, const TensorField& t);

/// max |J² + Id|
double j_squared_defect(const TensorField& j);
/// J ← J(−J²)^{−1/2} point-wise; returns the largest component change.
double project_complex_structure(TensorField& j);
/// max |g(J·, J·) − g|
double compatibility_defect(const Metric& g, const TensorField& j);

/// ω_{ij} = g(J e_i, e_j) = J_i^m g_{mj}. Throws when compatibility fails.
TensorField kahler_form(const Metric& g, const TensorField& j, double tol = 1e-9);
/// g_{ij} = ω(e_i, J e_j) = ω_{ip} J_j^p.
TensorField metric_from_kahler_form(const TensorField& omega, const TensorField& j);

/// α(J·, ..., J·)
TensorField apply_j(const TensorField& alpha, const TensorField& j);
/// d^c α = −(dα)(J·, J·, J·)
TensorField d_c(const TensorField& omega, const TensorField& j);
/// (1,1)-part ½(α + α(J·,J·)) of a 2-form.
TensorField project_11(const TensorField& alpha, const TensorField& j);

/// Nijenhuis tensor N[j][k][i] = N_{jk}^i, evaluated with the torsion-free
/// reference connection:
/// N_{jk}^i = J_j^p D_p J_k^i − J_k^p D_p J_j^i − J_p^i D_j J_k^p + J_p^i D_k J_j^p.
TensorField nijenhuis(const TensorField& j);
/// The same tensor evaluated from brackets of frame fields:
/// N(X,Y) = [JX,JY] − [X,Y] − J[JX,Y] − J[X,JY] with X = e_j, Y = e_k.
TensorField nijenhuis_bracket(const TensorField& j);
/// Lie bracket of vector fields in the global frame.
TensorField lie_bracket(const TensorField& x, const TensorField& y);

/// X = (−J d*ω)^♯, i.e. X^p = −g^{pq} J_q^r (d*ω)_r.
TensorField gauge_vector_field(const Metric& g, const TensorField& j);
/// X^p = −J_t^p D^s J_s^t with the Levi-Civita connection.
TensorField gauge_vector_field_coordinate(const Metric& g, const TensorField& j);
/// Lee form θ = −J d*ω (the 1-form dual to the gauge field).
TensorField lee_form(const Metric& g, const TensorField& j);

/// max over frame directions a of |L_{e_a} T|; zero iff the invariant
/// field T is also invariant from the other side (bi-invariant).
double ad_invariance_defect(const TensorField& t);

/// Right-invariant tensors on a group are stored as left-invariant tensors
/// of the opposite algebra. Copies a bi-invariant field to `target` (which
/// must be a frame backend of the same dimension); throws if the field is
/// not bi-invariant to `tol`. Torus fields are returned unchanged when
/// `target` is the field's own backend.
TensorField mirror_field(const TensorField& t, const BackendPtr& target, double tol = 1e-12);
Metric mirror_metric(const Metric& g, const BackendPtr& target, double tol = 1e-12);

/// Metric g, closed 3-form H, and the pair J₊, J₋. On a group backend J₋ may
/// live on the opposite algebra (right-invariant); g and H are then mirrored
/// there and must be bi-invariant.
struct GKState {
  Metric g;
  TensorField h;
  TensorField j_plus;
  TensorField j_minus;
};

struct GKResiduals {
  double compat_plus = 0, compat_minus = 0;
  double nij_plus = 0, nij_minus = 0;
  double r1 = 0;  ///< ‖d^c₊ω₊ − H‖
  double r2 = 0;  ///< ‖d^c₋ω₋ + H‖
  double r3 = 0;  ///< ‖dH‖
  double jsq_plus = 0, jsq_minus = 0;
  double max() const;
};

/// All norms are max-abs over points and components.
GKResiduals gk_residuals(const GKState& s);

}  // namespace gkflow
