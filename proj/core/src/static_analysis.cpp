#include "gkflow/static_analysis.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "gkflow/chern.hpp"
#include "gkflow/complex_structure.hpp"
#include "gkflow/connection.hpp"
#include "gkflow/flows.hpp"
#include "gkflow/forms.hpp"

namespace gkflow {

namespace {

// Static parts A = Rc − ¼H² + L_X g and B = −½Δ_d H + L_X H.
struct StaticParts {
  TensorField a;
  TensorField b;
};

StaticParts static_parts(const SolitonData& s) {
  StaticParts p;
  p.a = symmetrize2(ricci(s.g));
  p.a.axpy(-0.25, h_squared(s.g, s.h));
  p.b = laplace_beltrami(s.g, s.h);
  p.b *= -0.5;
  if (!s.is_static()) {
    p.a += lie_derivative(s.x, s.g.tensor());
    p.b += lie_derivative(s.x, s.h);
  }
  return p;
}

double residual_at(const StaticParts& p, const SolitonData& s, double lambda, double* rg = nullptr,
                   double* rh = nullptr) {
  TensorField eg = p.a;
  eg.axpy(-lambda, s.g.tensor());
  TensorField eh = p.b;
  eh.axpy(-lambda, s.h);
  const double a = eg.max_abs();
  const double b = eh.max_abs();
  if (rg) *rg = a;
  if (rh) *rh = b;
  return std::max(a, b);
}

double dot(const TensorField& a, const TensorField& b) {
  double acc = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) acc += va[i] * vb[i];
  return acc;
}

}  // namespace

SolitonResidual soliton_residual(const SolitonData& s) {
  if (s.h.rank() != 3) throw std::invalid_argument("soliton_residual: H must be a 3-form");
  StaticParts p = static_parts(s);
  SolitonResidual r;
  r.eq_g = std::move(p.a);
  r.eq_g.axpy(-s.lambda, s.g.tensor());
  r.eq_h = std::move(p.b);
  r.eq_h.axpy(-s.lambda, s.h);
  r.r_g = r.eq_g.max_abs();
  r.r_h = r.eq_h.max_abs();
  r.dh = s.h.rank() < s.h.dim() ? exterior_derivative(s.h).max_abs() : 0.0;
  return r;
}

StaticPropReport staticprop_checks(const SolitonData& s, const StaticPropOptions& opt) {
  if (!s.is_static()) throw std::invalid_argument("staticprop_checks: datum is not static (X != 0)");
  StaticPropReport rep;
  TensorField dstar = codifferential(s.g, s.h);
  const double dstar_l2 = l2_norm(s.g, dstar);
  rep.i1 = dstar_l2 * dstar_l2;
  const double h2 = l2_inner(s.g, s.h, s.h);
  rep.i2 = 2.0 * s.lambda * h2;
  rep.gap = std::abs(rep.i1 - rep.i2) / std::max({std::abs(rep.i1), std::abs(rep.i2), opt.gap_floor});
  rep.codiff_h = dstar.max_abs();

  TensorField m = symmetrize2(ricci(s.g));
  m.axpy(-s.lambda, s.g.tensor());
  const int n = s.g.dim();
  rep.min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t pt = 0; pt < s.g.num_points(); ++pt) {
    Eigen::MatrixXd a(n, n), b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a(i, j) = m(pt, i * n + j);
        b(i, j) = s.g.tensor()(pt, i * n + j);
      }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::EigenvaluesOnly);
    rep.min_eig = std::min(rep.min_eig, es.eigenvalues().minCoeff());
  }

  auto fail = [&rep](std::string msg) {
    rep.passed = false;
    rep.failures.push_back(std::move(msg));
  };
  if (rep.gap >= opt.gap_tol) fail("integral identity gap " + std::to_string(rep.gap));
  if (rep.min_eig < -opt.eig_tol) fail("Rc - lambda g not semidefinite: " + std::to_string(rep.min_eig));
  if (s.lambda == 0.0 && rep.codiff_h >= opt.codiff_tol) fail("d*H not zero: " + std::to_string(rep.codiff_h));
  if (s.lambda < 0.0 && s.h.max_abs() > opt.codiff_tol) fail("lambda < 0 with H != 0");
  return rep;
}

LeeFormReport lee_form_checks(const Metric& g, const TensorField& j, const TensorField& h) {
  LeeFormReport rep;
  TensorField theta = lee_form(g, j);
  rep.theta_norm = theta.max_abs();
  rep.d_theta = covariant_derivative(g, theta).max_abs();
  if (g.dim() == 4) {
    rep.star_checked = true;
    rep.theta_minus_star_h = max_difference(theta, hodge_star(g, h));
  } else {
    rep.notice = "theta = *H check skipped: real dimension " + std::to_string(g.dim()) + " != 4";
  }
  return rep;
}

double fit_lambda(const SolitonData& s) {
  StaticParts p = static_parts(s);
  const double num = dot(p.a, s.g.tensor()) + dot(p.b, s.h);
  const double den = dot(s.g.tensor(), s.g.tensor()) + dot(s.h, s.h);
  return num / den;
}

LambdaSweep lambda_sweep(const SolitonData& s, double lo, double hi, int samples, double tol) {
  if (!(hi > lo) || samples < 3) throw std::invalid_argument("lambda_sweep: need lo < hi and >= 3 samples");
  StaticParts p = static_parts(s);
  LambdaSweep out;
  int best = 0;
  for (int i = 0; i < samples; ++i) {
    const double l = lo + (hi - lo) * i / (samples - 1);
    out.samples.emplace_back(l, residual_at(p, s, l));
    if (out.samples[i].second < out.samples[best].second) best = i;
  }
  // The residual is convex in λ; refine in the bracketing cell pair.
  double a = out.samples[std::max(0, best - 1)].first;
  double b = out.samples[std::min(samples - 1, best + 1)].first;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = residual_at(p, s, c), fd = residual_at(p, s, d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = residual_at(p, s, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = residual_at(p, s, d);
    }
  }
  out.lambda_min = 0.5 * (a + b);
  out.residual_min = residual_at(p, s, out.lambda_min);
  return out;
}

ScaledSolitonFit solve_scaled_soliton(const Metric& g, const TensorField& h0, double lambda0, double kappa0,
                                      int max_iter, double tol) {
  const TensorField rc = symmetrize2(ricci(g));
  const TensorField h2 = h_squared(g, h0);
  const TensorField lap = laplace_beltrami(g, h0);
  const TensorField& gt = g.tensor();
  auto residual = [&](double l, double k, TensorField& fg, TensorField& fh) {
    fg = rc;
    fg.axpy(-0.25 * k * k, h2);
    fg.axpy(-l, gt);
    fh = lap;
    fh *= -0.5 * k;
    fh.axpy(-l * k, h0);
  };
  ScaledSolitonFit fit;
  fit.lambda = lambda0;
  fit.kappa = kappa0;
  TensorField fg, fh;
  for (int it = 0; it < max_iter; ++it) {
    fit.iterations = it + 1;
    residual(fit.lambda, fit.kappa, fg, fh);
    // Jacobian columns: ∂/∂λ = (−g, −κH₀), ∂/∂κ = (−½κH₀², −½Δ_dH₀ − λH₀).
    TensorField jl_h = h0;
    jl_h *= -fit.kappa;
    TensorField jk_g = h2;
    jk_g *= -0.5 * fit.kappa;
    TensorField jk_h = lap;
    jk_h *= -0.5;
    jk_h.axpy(-fit.lambda, h0);
    Eigen::Matrix2d n;
    n(0, 0) = dot(gt, gt) + dot(jl_h, jl_h);
    n(0, 1) = n(1, 0) = -dot(gt, jk_g) + dot(jl_h, jk_h);
    n(1, 1) = dot(jk_g, jk_g) + dot(jk_h, jk_h);
    Eigen::Vector2d rhs(-(-dot(gt, fg) + dot(jl_h, fh)), -(dot(jk_g, fg) + dot(jk_h, fh)));
    Eigen::Vector2d step = n.completeOrthogonalDecomposition().solve(rhs);
    fit.lambda += step(0);
    fit.kappa += step(1);
    if (step.lpNorm<Eigen::Infinity>() < tol * std::max(1.0, std::abs(fit.lambda) + std::abs(fit.kappa))) {
      fit.converged = true;
      break;
    }
  }
  residual(fit.lambda, fit.kappa, fg, fh);
  fit.residual = std::max(fg.max_abs(), fh.max_abs());
  return fit;
}

double cartan_normalization(const Metric& g, const TensorField& h0) {
  const TensorField rc = symmetrize2(ricci(g));
  const TensorField h2 = h_squared(g, h0);
  const double den = dot(h2, h2);
  if (den == 0.0) throw std::invalid_argument("cartan_normalization: H0² vanishes");
  return std::sqrt(std::max(0.0, 4.0 * dot(rc, h2) / den));
}

Eigen::Matrix4d hopf_metric(const std::array<double, 4>& x) {
  const double rho2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
  return Eigen::Matrix4d::Identity() * (2.0 / rho2);
}

CylinderInvariants hopf_cylinder_invariants() {
  BackendPtr b = make_frame(FrameAlgebra::su2_plus_r(std::sqrt(2.0), std::sqrt(2.0)));
  CurvatureInvariants inv = curvature_invariants(Metric::reference(b));
  return {inv.scal(0, 0), inv.rc_norm2(0, 0), inv.rm_norm2(0, 0)};
}

HopfSample hopf_static_point(const std::array<double, 4>& x, const HopfOptions& opt) {
  const double rho = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  if (!(rho >= opt.min_radius)) throw std::invalid_argument("hopf_static_point: sample too close to the origin");
  // Two derivative levels need two stencil half-widths of valid neighbours.
  const int half = opt.stencil_order;
  BackendPtr b = make_patch({x[0], x[1], x[2], x[3]}, half, opt.relative_spacing * rho, opt.stencil_order);
  const std::size_t centre = b->num_points() / 2;

  TensorField gt = TensorField::symmetric2(b);
  TensorField j = TensorField::endomorphism(b);
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    auto c = b->torus().coordinates(p);
    Eigen::Matrix4d m = hopf_metric({c[0], c[1], c[2], c[3]});
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) gt(p, i * 4 + k) = m(i, k);
    j(p, 0 * 4 + 1) = 1.0;
    j(p, 1 * 4 + 0) = -1.0;
    j(p, 2 * 4 + 3) = 1.0;
    j(p, 3 * 4 + 2) = -1.0;
  }
  Metric g(gt);

  HopfSample out;
  out.x = x;
  out.g = hopf_metric(x);
  const std::size_t sel[] = {centre};
  ChernQuantities cq = chern_quantities(g, j, 1e-5, sel);
  out.static_residual = cq.static_residual();
  out.surface_identity = cq.surface_identity_residual();
  const std::array<double, 4> x2{2 * x[0], 2 * x[1], 2 * x[2], 2 * x[3]};
  out.homogeneity = (4.0 * hopf_metric(x2) - out.g).cwiseAbs().maxCoeff();

  PluriclosedOptions po;
  po.check = false;
  TensorField rhs = pluriclosed_rhs(g, j, po);
  double r = 0.0;
  for (double v : rhs.at(centre)) r = std::max(r, std::abs(v));
  out.pluriclosed_rhs = r;

  CurvatureInvariants inv = curvature_invariants(g);
  out.scal = inv.scal(centre, 0);
  out.rc_norm2 = inv.rc_norm2(centre, 0);
  out.rm_norm2 = inv.rm_norm2(centre, 0);
  return out;
}

std::vector<HopfSample> hopf_static_metric(std::span<const std::array<double, 4>> samples, const HopfOptions& opt) {
  std::vector<HopfSample> out;
  out.reserve(samples.size());
  for (const auto& x : samples) out.push_back(hopf_static_point(x, opt));
  return out;
}

std::vector<std::array<double, 4>> hopf_sample_points(std::size_t count, unsigned long long seed, double r_lo,
                                                      double r_hi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(r_lo, r_hi);
  std::vector<std::array<double, 4>> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    std::array<double, 4> v{normal(rng), normal(rng), normal(rng), normal(rng)};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    if (n < 1e-8) continue;
    const double r = radius(rng);
    for (double& c : v) c *= r / n;
    pts.push_back(v);
  }
  return pts;
}

}  // namespace gkflow
