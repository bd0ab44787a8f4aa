#include "gkflow/flows.hpp"

#include <sstream>

#include "gkflow/chern.hpp"
#include "gkflow/connection.hpp"
#include "gkflow/forms.hpp"

namespace gkflow {

BFieldDerivative bfield_rhs(const Metric& g, const TensorField& h) {
  BFieldDerivative out;
  out.dg = symmetrize2(ricci(g));
  out.dg *= -2.0;
  out.dg.axpy(0.5, h_squared(g, h));
  out.dg.set_symmetry(Symmetry::Symmetric);
  out.dh = laplace_beltrami(g, h);
  out.dh.enforce_symmetry();
  return out;
}

TensorField JFlowTerms::total() const { return laplacian + curvature + quadratic; }

JFlowTerms j_rhs_terms(const Metric& g, const TensorField& j) {
  const int n = g.dim();
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  const std::size_t n3 = n2 * n;
  TensorField gamma = levi_civita(g);
  TensorField dj = covariant_derivative(gamma, j);     // [a][k][l] = D_a J_k^l
  TensorField ddj = covariant_derivative(gamma, dj);   // [s][t][k][l]
  TensorField rc = symmetrize2(ricci_from_riemann(riemann_from_connection(gamma)));

  JFlowTerms out;
  out.laplacian = TensorField::endomorphism(g.backend());
  out.curvature = TensorField::endomorphism(g.backend());
  out.quadratic = TensorField::endomorphism(g.backend());

  std::vector<double> up(n3), v(n), rcm(n2);
  for (std::size_t pt = 0; pt < g.num_points(); ++pt) {
    auto iv = g.inverse().at(pt);
    auto jv = j.at(pt);
    auto dv = dj.at(pt);
    auto ddv = ddj.at(pt);
    auto rv = rc.at(pt);
    auto lap = out.laplacian.at(pt);
    auto cur = out.curvature.at(pt);
    auto quad = out.quadratic.at(pt);
    auto J = [&](int a, int b) { return jv[a * n + b]; };
    auto DJ = [&](int a, int k, int l) { return dv[a * n2 + k * n + l]; };
    // up[s][k][l] = D^s J_k^l
    for (int s = 0; s < n; ++s)
      for (std::size_t c = 0; c < n2; ++c) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) acc += iv[s * n + a] * dv[a * n2 + c];
        up[s * n2 + c] = acc;
      }
    auto UJ = [&](int s, int k, int l) { return up[s * n2 + k * n + l]; };
    for (int t = 0; t < n; ++t) {
      double acc = 0.0;
      for (int s = 0; s < n; ++s) acc += UJ(s, s, t);
      v[t] = acc;
    }
    // Rc_k^l
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int p = 0; p < n; ++p) acc += rv[k * n + p] * iv[p * n + l];
        rcm[k * n + l] = acc;
      }
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double a_lap = 0.0;
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < n; ++t) a_lap += iv[s * n + t] * ddv[(s * n + t) * n2 + k * n + l];
        lap[k * n + l] = a_lap;

        double a_cur = 0.0;
        for (int p = 0; p < n; ++p) a_cur += J(k, p) * rcm[p * n + l] - rcm[k * n + p] * J(p, l);
        cur[k * n + l] = a_cur;

        double q = 0.0;
        for (int p = 0; p < n; ++p)
          for (int s = 0; s < n; ++s)
            for (int i = 0; i < n; ++i) {
              q += -J(k, p) * UJ(s, i, l) * DJ(p, s, i) - J(i, l) * UJ(s, k, p) * DJ(p, s, i) +
                   J(s, p) * UJ(s, i, l) * DJ(p, k, i) + J(i, l) * UJ(s, s, p) * DJ(p, k, i);
            }
        for (int p = 0; p < n; ++p)
          for (int t = 0; t < n; ++t) {
            q += -J(p, l) * DJ(k, t, p) * v[t] + J(k, p) * DJ(p, t, l) * v[t] - J(t, p) * v[t] * DJ(p, k, l);
          }
        quad[k * n + l] = q;
      }
  }
  return out;
}

TensorField j_rhs(const Metric& g, const TensorField& j) { return j_rhs_terms(g, j).total(); }

namespace {
TensorField j_rhs_on_own_backend(const Metric& g, const TensorField& j) {
  return j_rhs(mirror_metric(g, j.backend(), 1e-10), j);
}
}  // namespace

GKDerivative gk_coupled_rhs(const GKState& s) {
  BFieldDerivative b = bfield_rhs(s.g, s.h);
  GKDerivative out;
  out.dg = std::move(b.dg);
  out.dh = std::move(b.dh);
  out.dj_plus = j_rhs_on_own_backend(s.g, s.j_plus);
  out.dj_minus = j_rhs_on_own_backend(s.g, s.j_minus);
  return out;
}

GKDerivative deturck_gauge_rhs(const GKState& s, const TensorField& gamma0) {
  GKDerivative out = gk_coupled_rhs(s);
  const TensorField g0 = gamma0.empty() ? reference_connection(s.g.backend()) : gamma0;
  TensorField x = deturck_vector_field(s.g, g0);
  if (x.max_abs() == 0.0) return out;
  out.dg += lie_derivative(x, s.g.tensor());
  out.dh += lie_derivative(x, s.h);
  out.dj_plus += lie_derivative(mirror_field(x, s.j_plus.backend(), 1e-10), s.j_plus);
  out.dj_minus += lie_derivative(mirror_field(x, s.j_minus.backend(), 1e-10), s.j_minus);
  return out;
}

TensorField metric_rate_from_form_rate(const TensorField& domega, const TensorField& j) {
  TensorField r = metric_from_kahler_form(domega, j);
  return r;
}

TensorField pluriclosed_rhs(const Metric& g, const TensorField& j, const PluriclosedOptions& opt) {
  TensorField omega = kahler_form(g, j);
  if (opt.check) {
    const double nij = nijenhuis(j).max_abs();
    if (nij > opt.integrability_tol) {
      std::ostringstream os;
      os << "pluriclosed_rhs: J is not integrable (Nijenhuis " << nij << ")";
      throw IncompatibleStructureError(os.str(), nij);
    }
    const double ddc = exterior_derivative(d_c(omega, j)).max_abs();
    if (ddc > opt.pluriclosed_tol) {
      std::ostringstream os;
      os << "pluriclosed_rhs: metric is not pluriclosed (|dd^c ω| = " << ddc << ")";
      throw IncompatibleStructureError(os.str(), ddc);
    }
  }
  TensorField out = project_11(exterior_derivative(codifferential(g, omega)), j);
  out -= chern_ricci_form(g, j);
  out.enforce_symmetry();
  return out;
}

}  // namespace gkflow
