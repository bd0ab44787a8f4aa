#include "gkflow/verification.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gkflow/complex_structure.hpp"
#include "gkflow/connection.hpp"
#include "gkflow/flows.hpp"
#include "gkflow/forms.hpp"
#include "gkflow/gauge_transport.hpp"

namespace gkflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Mode {
  std::vector<int> k;
  double a;
  double phase;
};

std::vector<Mode> draw_modes(std::mt19937_64& rng, int dim, int modes, double amplitude) {
  std::uniform_int_distribution<int> wave(-1, 1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Mode> out;
  for (int m = 0; m < modes; ++m) {
    Mode md;
    md.k.resize(dim);
    for (int& k : md.k) k = wave(rng);
    md.a = amplitude * unit(rng);
    md.phase = std::numbers::pi * unit(rng);
    out.push_back(std::move(md));
  }
  return out;
}

double eval_modes(const std::vector<Mode>& modes, const std::vector<double>& x, const std::vector<double>& periods) {
  double v = 0.0;
  for (const Mode& m : modes) {
    double arg = m.phase;
    for (std::size_t a = 0; a < x.size(); ++a) arg += m.k[a] * kTwoPi * x[a] / periods[a];
    v += m.a * std::cos(arg);
  }
  return v;
}

double max_symmetric_part_defect(const TensorField& rc) {
  const int n = rc.dim();
  double worst = 0.0;
  for (std::size_t p = 0; p < rc.num_points(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) worst = std::max(worst, std::abs(rc(p, i * n + j) - rc(p, j * n + i)));
  return worst;
}

// Manufactured data for self-convergence: g = e^{2f}δ with f = 0.25 sin x0 cos x1.
struct Manufactured {
  Metric g;
  TensorField alpha;  // 1-form
  TensorField beta;   // 2-form
  TensorField h;      // 3-form
};

Manufactured manufactured(int n, int order) {
  const int m = order == 0 ? 4 : std::max(5, order + 1);
  BackendPtr b = make_torus({n, n, m, m}, std::vector<double>(4, kTwoPi), order);
  Manufactured out;
  TensorField g0 = TensorField::symmetric2(b);
  out.alpha = TensorField::form(b, 1);
  out.beta = TensorField::form(b, 2);
  out.h = TensorField::form(b, 3);
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    auto x = b->torus().coordinates(p);
    const double e2f = std::exp(0.5 * std::sin(x[0]) * std::cos(x[1]));
    for (int i = 0; i < 4; ++i) g0(p, i * 5) = e2f;
    out.alpha(p, 2) = std::sin(x[0] + x[1]);
    out.alpha(p, 3) = std::cos(x[0]) * std::sin(x[1]);
    const double b02 = std::sin(x[0]) * std::cos(x[1]);
    const double b13 = std::cos(x[0] + x[1]);
    out.beta(p, 0 * 4 + 2) = b02;
    out.beta(p, 2 * 4 + 0) = -b02;
    out.beta(p, 1 * 4 + 3) = b13;
    out.beta(p, 3 * 4 + 1) = -b13;
  }
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    auto x = b->torus().coordinates(p);
    out.h(p, out.h.flat({1, 2, 3})) = std::sin(x[0]) * std::cos(2.0 * x[1]);
    out.h(p, out.h.flat({0, 2, 3})) = std::cos(x[0] - x[1]);
  }
  out.h.enforce_symmetry();
  out.h *= 6.0;  // enforce_symmetry averages the one set component over 3! slots
  out.g = Metric(g0);
  return out;
}

// max |coarse − fine| over the coarse nodes (the fine grid refines axes 0, 1 by two).
double coarse_difference(const TensorField& coarse, const TensorField& fine) {
  const TorusChart& cc = coarse.backend()->torus();
  const TorusChart& fc = fine.backend()->torus();
  double worst = 0.0;
  for (std::size_t p = 0; p < coarse.num_points(); ++p) {
    auto idx = cc.multi_index(p);
    std::size_t q = 0;
    for (int a = 0; a < cc.dim(); ++a) q += static_cast<std::size_t>(a < 2 ? 2 * idx[a] : idx[a]) * fc.stride(a);
    for (std::size_t c = 0; c < coarse.components(); ++c)
      worst = std::max(worst, std::abs(coarse(p, c) - fine(q, c)));
  }
  return worst;
}

}  // namespace

CheckRow make_check(std::string name, double value, double tol, std::string detail) {
  CheckRow r;
  r.name = std::move(name);
  r.value = value;
  r.tol = tol;
  r.pass = std::isfinite(value) && value <= tol;
  r.detail = std::move(detail);
  return r;
}

bool all_pass(const CheckList& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

TensorField random_smooth_field(const BackendPtr& b, std::vector<Index> slots, Symmetry sym, std::mt19937_64& rng,
                                double amplitude, int modes) {
  TensorField t(b, std::move(slots), sym);
  const int n = b->dim();
  for (std::size_t c = 0; c < t.components(); ++c) {
    auto md = draw_modes(rng, n, modes, amplitude);
    for (std::size_t p = 0; p < t.num_points(); ++p) {
      if (b->is_torus())
        t(p, c) = eval_modes(md, b->torus().coordinates(p), b->torus().periods());
      else
        t(p, c) = eval_modes(md, std::vector<double>(n, 0.0), std::vector<double>(n, 1.0));
    }
  }
  t.enforce_symmetry();
  return t;
}

Metric random_smooth_metric(const BackendPtr& b, std::mt19937_64& rng, double amplitude) {
  TensorField g = random_smooth_field(b, {Index::Lower, Index::Lower}, Symmetry::Symmetric, rng, amplitude);
  const int n = b->dim();
  for (std::size_t p = 0; p < g.num_points(); ++p)
    for (int i = 0; i < n; ++i) g(p, i * n + i) += 1.0;
  return Metric(g);
}

TensorField random_complex_structure(const BackendPtr& b, std::mt19937_64& rng, double amplitude) {
  const int n = b->dim();
  if (n % 2) throw std::invalid_argument("random_complex_structure: odd dimension");
  TensorField a = random_smooth_field(b, {Index::Lower, Index::Upper}, Symmetry::None, rng, amplitude);
  TensorField j = TensorField::endomorphism(b);
  Eigen::MatrixXd j0 = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; k += 2) {
    j0(k, k + 1) = 1.0;
    j0(k + 1, k) = -1.0;
  }
  for (std::size_t p = 0; p < j.num_points(); ++p) {
    Eigen::MatrixXd m(n, n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) m(k, l) = (k == l ? 1.0 : 0.0) + a(p, k * n + l);
    Eigen::MatrixXd r = m.inverse() * j0 * m;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) j(p, k * n + l) = r(k, l);
  }
  return j;
}

CheckList identity_suite(unsigned long long seed, const IdentitySuiteOptions& opt) {
  std::mt19937_64 rng(seed);
  CheckList rows;
  BackendPtr b = make_torus(opt.resolution, std::vector<double>(opt.resolution.size(), kTwoPi), opt.stencil_order);
  const int n = b->dim();
  Metric g = random_smooth_metric(b, rng, opt.amplitude);

  TensorField rm = riemann(g);
  {
    double bianchi = 0.0, anti = 0.0;
    for (std::size_t p = 0; p < rm.num_points(); ++p)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              auto at = [&](int a, int bb, int c) { return rm(p, ((a * n + bb) * n + c) * n + l); };
              bianchi = std::max(bianchi, std::abs(at(i, j, k) + at(j, k, i) + at(k, i, j)));
              anti = std::max(anti, std::abs(at(i, j, k) + at(j, i, k)));
            }
    rows.push_back(make_check("first_bianchi", bianchi, 1e-7));
    rows.push_back(make_check("riemann_antisymmetry", anti, 1e-12));
  }
  rows.push_back(make_check("ricci_symmetry", max_symmetric_part_defect(ricci(g)), 1e-9,
                            "raw contraction defect " + std::to_string(max_symmetric_part_defect(ricci_from_riemann(rm)))));
  rows.push_back(make_check("metric_compatibility", covariant_derivative(g, g.tensor()).max_abs(), 1e-9));

  {
    TensorField a1 = random_smooth_field(b, {Index::Lower}, Symmetry::Antisymmetric, rng, 1.0);
    TensorField a2 = random_smooth_field(b, {Index::Lower, Index::Lower}, Symmetry::Antisymmetric, rng, 1.0);
    const double dd = std::max(exterior_derivative(exterior_derivative(a1)).max_abs(),
                               exterior_derivative(exterior_derivative(a2)).max_abs());
    rows.push_back(make_check("d_squared", dd, 1e-9));
    TensorField back = hodge_star(g, hodge_star(g, a2));
    rows.push_back(make_check("hodge_involution_2forms", max_difference(back, a2), 1e-10));
    TensorField b2 = random_smooth_field(b, {Index::Lower, Index::Lower}, Symmetry::Antisymmetric, rng, 1.0);
    const double lhs = l2_inner(g, exterior_derivative(a1), b2);
    const double rhs = l2_inner(g, a1, codifferential(g, b2));
    rows.push_back(make_check("d_codifferential_adjoint",
                              std::abs(lhs - rhs) / (l2_norm(g, a1) * l2_norm(g, b2)), 1e-8));
    TensorField bb = random_smooth_field(b, {Index::Lower, Index::Lower}, Symmetry::Antisymmetric, rng, 0.5);
    TensorField h = exterior_derivative(bb);
    TensorField h2 = h_squared(g, h);
    double min_eig = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < h2.num_points(); ++p) {
      Eigen::MatrixXd m(n, n), gm(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          m(i, j) = h2(p, i * n + j);
          gm(i, j) = g.tensor()(p, i * n + j);
        }
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(m, gm, Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    rows.push_back(make_check("h_squared_semidefinite", std::max(0.0, -min_eig), 1e-10));
  }

  {
    TensorField j = random_complex_structure(b, rng, opt.amplitude);
    rows.push_back(make_check("nijenhuis_coordinate_vs_bracket", max_difference(nijenhuis(j), nijenhuis_bracket(j)),
                              1e-9));
    BackendPtr grp = make_frame(FrameAlgebra::su2_plus_r(1.0));
    TensorField jg = random_complex_structure(grp, rng, 0.3);
    rows.push_back(make_check("nijenhuis_coordinate_vs_bracket_group",
                              max_difference(nijenhuis(jg), nijenhuis_bracket(jg)), 1e-12));
  }

  {
    // (φ_ε*J − J)/ε → L_X J at first order; band-limited data keep transport exact.
    BackendPtr s = make_torus({6, 6, 6, 6}, std::vector<double>(4, kTwoPi), 0);
    TensorField x = random_smooth_field(s, {Index::Upper}, Symmetry::None, rng, 0.2);
    TensorField j = random_smooth_field(s, {Index::Lower, Index::Upper}, Symmetry::None, rng, 1.0);
    TensorField lx = lie_derivative(x, j);
    auto transport_error = [&](double eps) {
      std::vector<double> times{0.0, eps / 3.0, 2.0 * eps / 3.0, eps};
      SampledVectorField field(times, std::vector<TensorField>(4, x));
      DiffeoOptions d;
      d.substeps = 2;
      DiffeoFlow phi = integrate_diffeo(field, s, times, d);
      TensorField fd = pullback(phi, phi.num_times() - 1, j);
      fd -= j;
      fd *= 1.0 / eps;
      return max_difference(fd, lx);
    };
    const double e1 = transport_error(2e-3);
    const double e2 = transport_error(1e-3);
    const double order = std::log2(e1 / e2);
    rows.push_back(make_check("lie_derivative_vs_transport_order", std::abs(order - 1.0), 0.1,
                              "errors " + std::to_string(e1) + " " + std::to_string(e2)));
  }

  {
    BackendPtr t = make_torus({8, 8, 8, 8}, std::vector<double>(4, kTwoPi), opt.stencil_order);
    BackendPtr f = make_frame(FrameAlgebra::abelian(4));
    CurvatureInvariants it = curvature_invariants(Metric::reference(t));
    CurvatureInvariants iff = curvature_invariants(Metric::reference(f));
    double d = 0.0;
    for (std::size_t p = 0; p < t->num_points(); ++p)
      d = std::max({d, std::abs(it.scal(p, 0) - iff.scal(0, 0)), std::abs(it.rc_norm2(p, 0) - iff.rc_norm2(0, 0))});
    rows.push_back(make_check("flat_torus_vs_abelian_group", d, 1e-10));
  }
  return rows;
}

std::vector<ConvergenceRow> self_convergence(int stencil_order, const std::vector<int>& resolutions) {
  if (resolutions.size() < 3) throw std::invalid_argument("self_convergence: need three resolutions");
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] != 2 * resolutions[i - 1])
      throw std::invalid_argument("self_convergence: resolutions must double");
  std::vector<std::vector<TensorField>> out(4);
  for (int n : resolutions) {
    Manufactured m = manufactured(n, stencil_order);
    out[0].push_back(exterior_derivative(m.alpha));
    out[1].push_back(codifferential(m.g, m.beta));
    out[2].push_back(laplace_beltrami(m.g, m.h));
    out[3].push_back(riemann(m.g));
  }
  const char* names[] = {"exterior_derivative", "codifferential", "laplace_beltrami", "riemann"};
  std::vector<ConvergenceRow> rows;
  for (int o = 0; o < 4; ++o) {
    ConvergenceRow r;
    r.op = names[o];
    r.resolutions = resolutions;
    for (std::size_t i = 0; i + 1 < resolutions.size(); ++i)
      r.errors.push_back(coarse_difference(out[o][i], out[o][i + 1]));
    const std::size_t k = r.errors.size();
    r.order = std::log2(r.errors[k - 2] / r.errors[k - 1]);
    rows.push_back(std::move(r));
  }
  return rows;
}

double bfield_sign_symmetry(const Metric& g, const TensorField& h) {
  BFieldDerivative a = bfield_rhs(g, h);
  TensorField hm = h;
  hm *= -1.0;
  BFieldDerivative b = bfield_rhs(g, hm);
  TensorField dh = b.dh;
  dh += a.dh;
  return std::max(max_difference(a.dg, b.dg), dh.max_abs());
}

StructureSummary structure_summary(const FlowTrajectory& tr) {
  StructureSummary s;
  for (const FlowRecord& r : tr.records) {
    s.dh = std::max(s.dh, r.dh_norm);
    s.jsq = std::max({s.jsq, r.residuals.jsq_plus, r.residuals.jsq_minus});
  }
  return s;
}

}  // namespace gkflow
