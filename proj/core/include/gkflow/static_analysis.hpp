#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gkflow/metric.hpp"
#include "gkflow/tensor_field.hpp"

namespace gkflow {

/// B-field flow soliton candidate: Rc − ¼H² + L_X g = λg and
/// −½Δ_d H + L_X H = λH. An empty X means X = 0 (static).
struct SolitonData {
  Metric g;
  TensorField h;
  TensorField x;
  double lambda = 0.0;
  bool is_static() const { return x.empty() || x.max_abs() == 0.0; }
};

struct SolitonResidual {
  double r_g = 0.0;
  double r_h = 0.0;
  double dh = 0.0;  ///< ‖dH‖, validity of the datum
  TensorField eq_g;
  TensorField eq_h;
  double max() const { return std::max(r_g, r_h); }
};

SolitonResidual soliton_residual(const SolitonData& s);

/// Integral identity and sign checks for a static datum.
struct StaticPropReport {
  double i1 = 0.0;        ///< ∫|d*H|²
  double i2 = 0.0;        ///< 2λ∫|H|²
  double gap = 0.0;       ///< |I₁ − I₂| / max(I₁, I₂, floor)
  double min_eig = 0.0;   ///< smallest eigenvalue of g^{-1}(Rc − λg)
  double codiff_h = 0.0;  ///< ‖d*H‖ (checked when λ = 0)
  bool passed = true;
  std::vector<std::string> failures;
};

struct StaticPropOptions {
  double gap_tol = 1e-6;
  double eig_tol = 1e-9;
  double codiff_tol = 1e-9;
  double gap_floor = 1e-12;
};

StaticPropReport staticprop_checks(const SolitonData& s, const StaticPropOptions& opt = {});

/// Lee form θ = −J d*ω: ‖θ − ⋆H‖ (real dimension 4 only) and ‖Dθ‖.
struct LeeFormReport {
  double theta_minus_star_h = 0.0;
  double d_theta = 0.0;
  double theta_norm = 0.0;
  bool star_checked = false;
  std::string notice;
};

LeeFormReport lee_form_checks(const Metric& g, const TensorField& j, const TensorField& h);

/// λ minimizing the L² static residual of (g, H, X) in closed form.
double fit_lambda(const SolitonData& s);

/// Max-norm static residual max(r_g, r_H) as a function of λ, minimized over
/// [lo, hi] by a grid scan followed by golden-section refinement.
struct LambdaSweep {
  double lambda_min = 0.0;
  double residual_min = 0.0;
  std::vector<std::pair<double, double>> samples;
};
LambdaSweep lambda_sweep(const SolitonData& s, double lo, double hi, int samples = 41, double tol = 1e-10);

/// Solves for (λ, κ) such that (g, κH₀) is a static soliton with constant λ
/// (Gauss–Newton on the L² residual from the given start).
struct ScaledSolitonFit {
  double lambda = 0.0;
  double kappa = 0.0;
  double residual = 0.0;  ///< max-norm residual at the solution
  int iterations = 0;
  bool converged = false;
};
ScaledSolitonFit solve_scaled_soliton(const Metric& g, const TensorField& h0, double lambda0, double kappa0,
                                      int max_iter = 50, double tol = 1e-13);

/// κ ≥ 0 with Rc = ¼κ²H₀² in the least-squares sense (λ = 0).
double cartan_normalization(const Metric& g, const TensorField& h0);

/// Hopf metric on C²∖{0} in real coordinates (x₁, y₁, x₂, y₂): the
/// Hermitian form of ω = i ρ^{-2} ∂∂̄ρ², i.e. g = 2δ/ρ². The complex
/// structure is the standard one, J ∂x_k = ∂y_k.
Eigen::Matrix4d hopf_metric(const std::array<double, 4>& x);

struct HopfOptions {
  double relative_spacing = 2e-3;  ///< patch spacing in units of ρ
  int stencil_order = 4;
  double min_radius = 1e-3;
};

/// Pointwise static data of the Hopf metric at one sample, computed on a
/// local stencil patch around it.
struct HopfSample {
  std::array<double, 4> x{};
  Eigen::Matrix4d g;
  double static_residual = 0.0;    ///< max |S − Q|
  double surface_identity = 0.0;   ///< max |Q − ½|T|² h|
  double homogeneity = 0.0;        ///< max |4 g(2x) − g(x)|
  double pluriclosed_rhs = 0.0;    ///< max |(dd*ω)^{1,1} − ρ_C|
  double scal = 0.0;
  double rc_norm2 = 0.0;
  double rm_norm2 = 0.0;
};

/// Scal, |Rc|², |Rm|² of the round cylinder R × S³(√2) that the Hopf metric
/// is locally isometric to, evaluated on the frame backend.
struct CylinderInvariants {
  double scal = 0.0;
  double rc_norm2 = 0.0;
  double rm_norm2 = 0.0;
};
CylinderInvariants hopf_cylinder_invariants();

HopfSample hopf_static_point(const std::array<double, 4>& x, const HopfOptions& opt = {});
std::vector<HopfSample> hopf_static_metric(std::span<const std::array<double, 4>> samples,
                                           const HopfOptions& opt = {});

/// Deterministic sample points with ρ in [r_lo, r_hi].
std::vector<std::array<double, 4>> hopf_sample_points(std::size_t count, unsigned long long seed, double r_lo = 0.5,
                                                      double r_hi = 2.0);

}  // namespace gkflow
