#include "gkflow/complex_structure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "gkflow/connection.hpp"
#include "gkflow/forms.hpp"

namespace gkflow {

namespace {

void require_endomorphism(const TensorField& j, const char* who) {
  const auto& s = j.slots();
  if (s.size() != 2 || s[0] != Index::Lower || s[1] != Index::Upper)
    throw std::invalid_argument(std::string(who) + ": expected an endomorphism field (Lower, Upper)");
}

TensorField kahler_form_unchecked(const Metric& g, const TensorField& j) {
  const int n = g.dim();
  TensorField out = TensorField::form(g.backend(), 2);
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    auto gv = g.tensor().at(p);
    auto jv = j.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) acc += jv[i * n + m] * gv[m * n + k];
        o[i * n + k] = acc;
      }
  }
  return out;
}

TensorField constant_vector(const BackendPtr& b, int axis) {
  TensorField v = TensorField::vector(b);
  for (std::size_t p = 0; p < v.num_points(); ++p) v(p, axis) = 1.0;
  return v;
}

}  // namespace

TensorField identity_endomorphism(const BackendPtr& b) {
  TensorField id = TensorField::endomorphism(b);
  const int n = b->dim();
  for (std::size_t p = 0; p < id.num_points(); ++p)
    for (int i = 0; i < n; ++i) id(p, i * n + i) = 1.0;
  return id;
}

TensorField compose(const TensorField& a, const TensorField& b) {
  require_endomorphism(a, "compose");
  require_endomorphism(b, "compose");
  const int n = a.dim();
  TensorField out = TensorField::endomorphism(a.backend());
  for (std::size_t p = 0; p < a.num_points(); ++p) {
    auto av = a.at(p);
    auto bv = b.at(p);
    auto o = out.at(p);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int q = 0; q < n; ++q) acc += bv[k * n + q] * av[q * n + l];
        o[k * n + l] = acc;
      }
  }
  return out;
}

TensorField commutator(const TensorField& a, const TensorField& b) { return compose(a, b) - compose(b, a); }

TensorField as_endomorphism(const Metric& g, const TensorField& t) {
  return contract_slot(t, 1, g.inverse(), Index::Upper);
}

double j_squared_defect(const TensorField& j) {
  require_endomorphism(j, "j_squared_defect");
  TensorField sq = compose(j, j);
  sq += identity_endomorphism(j.backend());
  return sq.max_abs();
}

double project_complex_structure(TensorField& j) {
  require_endomorphism(j, "project_complex_structure");
  const int n = j.dim();
  double change = 0.0;
  Eigen::MatrixXd m(n, n);
  for (std::size_t p = 0; p < j.num_points(); ++p) {
    auto v = j.at(p);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) m(k, l) = v[k * n + l];
    // Newton iteration X ← ½(X − X⁻¹) converges quadratically to J(−J²)^{-1/2}.
    Eigen::MatrixXd proj = m;
    for (int it = 0; it < 60; ++it) {
      Eigen::MatrixXd next = 0.5 * (proj - proj.partialPivLu().inverse());
      const double delta = (next - proj).cwiseAbs().maxCoeff();
      proj = next;
      if (!(delta > 1e-15 * std::max(1.0, proj.cwiseAbs().maxCoeff()))) break;
    }
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        change = std::max(change, std::abs(proj(k, l) - v[k * n + l]));
        v[k * n + l] = proj(k, l);
      }
  }
  return change;
}

double compatibility_defect(const Metric& g, const TensorField& j) {
  require_endomorphism(j, "compatibility_defect");
  const int n = g.dim();
  double worst = 0.0;
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    auto gv = g.tensor().at(p);
    auto jv = j.at(p);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double acc = 0.0;
        for (int q = 0; q < n; ++q)
          for (int r = 0; r < n; ++r) acc += jv[a * n + q] * jv[b * n + r] * gv[q * n + r];
        worst = std::max(worst, std::abs(acc - gv[a * n + b]));
      }
  }
  return worst;
}

TensorField kahler_form(const Metric& g, const TensorField& j, double tol) {
  require_endomorphism(j, "kahler_form");
  const double d = compatibility_defect(g, j);
  if (!(d <= tol)) {
    std::ostringstream os;
    os << "kahler_form: J is not compatible with g (residual " << d << ")";
    throw IncompatibleStructureError(os.str(), d);
  }
  return kahler_form_unchecked(g, j);
}

TensorField metric_from_kahler_form(const TensorField& omega, const TensorField& j) {
  const int n = omega.dim();
  TensorField out = TensorField::symmetric2(omega.backend());
  for (std::size_t p = 0; p < omega.num_points(); ++p) {
    auto wv = omega.at(p);
    auto jv = j.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int q = 0; q < n; ++q) acc += wv[i * n + q] * jv[k * n + q];
        o[i * n + k] = acc;
      }
  }
  out.enforce_symmetry();
  return out;
}

TensorField apply_j(const TensorField& alpha, const TensorField& j) {
  require_endomorphism(j, "apply_j");
  TensorField r = alpha;
  for (int s = 0; s < alpha.rank(); ++s) r = contract_slot(r, s, j, Index::Lower);
  return r;
}

TensorField d_c(const TensorField& omega, const TensorField& j) {
  TensorField r = apply_j(exterior_derivative(omega), j);
  r *= -1.0;
  return r;
}

TensorField project_11(const TensorField& alpha, const TensorField& j) {
  if (alpha.rank() != 2) throw std::invalid_argument("project_11: expected a 2-form");
  TensorField r = alpha + apply_j(alpha, j);
  r *= 0.5;
  return r;
}

TensorField nijenhuis(const TensorField& j) {
  require_endomorphism(j, "nijenhuis");
  const int n = j.dim();
  TensorField dj = covariant_derivative(reference_connection(j.backend()), j);  // [p][k][l]
  TensorField out(j.backend(), {Index::Lower, Index::Lower, Index::Upper});
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  for (std::size_t pt = 0; pt < j.num_points(); ++pt) {
    auto jv = j.at(pt);
    auto dv = dj.at(pt);
    auto o = out.at(pt);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int p = 0; p < n; ++p) {
            acc += jv[a * n + p] * dv[p * n2 + b * n + i] - jv[b * n + p] * dv[p * n2 + a * n + i] -
                   jv[p * n + i] * dv[a * n2 + b * n + p] + jv[p * n + i] * dv[b * n2 + a * n + p];
          }
          o[(a * n + b) * n + i] = acc;
        }
  }
  return out;
}

TensorField lie_bracket(const TensorField& x, const TensorField& y) {
  const int n = x.dim();
  const auto& b = *x.backend();
  TensorField dx = frame_derivative(x);
  TensorField dy = frame_derivative(y);
  TensorField out = TensorField::vector(x.backend());
  for (std::size_t p = 0; p < x.num_points(); ++p) {
    auto xv = x.at(p);
    auto yv = y.at(p);
    auto dxv = dx.at(p);
    auto dyv = dy.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int q = 0; q < n; ++q) acc += xv[q] * dyv[q * n + i] - yv[q] * dxv[q * n + i];
      if (b.has_brackets())
        for (int q = 0; q < n; ++q)
          for (int r = 0; r < n; ++r) acc += xv[q] * yv[r] * b.structure_constant(i, q, r);
      o[i] = acc;
    }
  }
  return out;
}

TensorField nijenhuis_bracket(const TensorField& j) {
  require_endomorphism(j, "nijenhuis_bracket");
  const int n = j.dim();
  const auto& bp = j.backend();
  std::vector<TensorField> e, je;
  for (int a = 0; a < n; ++a) {
    e.push_back(constant_vector(bp, a));
    TensorField v = TensorField::vector(bp);
    for (std::size_t p = 0; p < v.num_points(); ++p)
      for (int l = 0; l < n; ++l) v(p, l) = j(p, a * n + l);
    je.push_back(std::move(v));
  }
  auto apply = [&](const TensorField& v) {
    TensorField out = TensorField::vector(bp);
    for (std::size_t p = 0; p < v.num_points(); ++p)
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int q = 0; q < n; ++q) acc += v(p, q) * j(p, q * n + l);
        out(p, l) = acc;
      }
    return out;
  };
  TensorField out(bp, {Index::Lower, Index::Lower, Index::Upper});
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      if (c == a) continue;
      TensorField v = lie_bracket(je[a], je[c]) - lie_bracket(e[a], e[c]) - apply(lie_bracket(je[a], e[c])) -
                      apply(lie_bracket(e[a], je[c]));
      for (std::size_t p = 0; p < v.num_points(); ++p)
        for (int i = 0; i < n; ++i) out(p, (a * n + c) * n + i) = v(p, i);
    }
  return out;
}

TensorField lee_form(const Metric& g, const TensorField& j) {
  require_endomorphism(j, "lee_form");
  const int n = g.dim();
  TensorField ds = codifferential(g, kahler_form_unchecked(g, j));
  TensorField theta = TensorField::form(g.backend(), 1);
  for (std::size_t p = 0; p < g.num_points(); ++p)
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r) acc += j(p, q * n + r) * ds(p, r);
      theta(p, q) = -acc;
    }
  return theta;
}

TensorField gauge_vector_field(const Metric& g, const TensorField& j) {
  return raise_one_form(g, lee_form(g, j));
}

TensorField gauge_vector_field_coordinate(const Metric& g, const TensorField& j) {
  require_endomorphism(j, "gauge_vector_field_coordinate");
  const int n = g.dim();
  TensorField dj = covariant_derivative(g, j);  // [a][s][t]
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  TensorField x = TensorField::vector(g.backend());
  std::vector<double> v(n);
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    auto iv = g.inverse().at(p);
    auto dv = dj.at(p);
    auto jv = j.at(p);
    for (int t = 0; t < n; ++t) {
      double acc = 0.0;
      for (int s = 0; s < n; ++s)
        for (int a = 0; a < n; ++a) acc += iv[s * n + a] * dv[a * n2 + s * n + t];
      v[t] = acc;
    }
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int t = 0; t < n; ++t) acc += jv[t * n + q] * v[t];
      x(p, q) = -acc;
    }
  }
  return x;
}

double ad_invariance_defect(const TensorField& t) {
  const auto& b = t.backend();
  if (!b->has_brackets()) return 0.0;
  double worst = 0.0;
  for (int a = 0; a < b->dim(); ++a) worst = std::max(worst, lie_derivative(constant_vector(b, a), t).max_abs());
  return worst;
}

TensorField mirror_field(const TensorField& t, const BackendPtr& target, double tol) {
  if (t.backend() == target) return t;
  if (!target->is_frame() || !t.backend()->is_frame())
    throw std::invalid_argument("mirror_field: both backends must be frame algebras");
  const double d = ad_invariance_defect(t);
  if (d > tol) {
    std::ostringstream os;
    os << "mirror_field: field is not bi-invariant (defect " << d << ")";
    throw IncompatibleStructureError(os.str(), d);
  }
  return t.rebind(target);
}

Metric mirror_metric(const Metric& g, const BackendPtr& target, double tol) {
  if (g.backend() == target) return g;
  return Metric(mirror_field(g.tensor(), target, tol));
}

double GKResiduals::max() const {
  return std::max({compat_plus, compat_minus, nij_plus, nij_minus, r1, r2, r3, jsq_plus, jsq_minus});
}

GKResiduals gk_residuals(const GKState& s) {
  GKResiduals r;
  const Metric gm = mirror_metric(s.g, s.j_minus.backend(), 1e-10);
  const TensorField hm = mirror_field(s.h, s.j_minus.backend(), 1e-10);
  r.compat_plus = compatibility_defect(s.g, s.j_plus);
  r.compat_minus = compatibility_defect(gm, s.j_minus);
  r.nij_plus = nijenhuis(s.j_plus).max_abs();
  r.nij_minus = nijenhuis(s.j_minus).max_abs();
  r.jsq_plus = j_squared_defect(s.j_plus);
  r.jsq_minus = j_squared_defect(s.j_minus);
  TensorField wp = kahler_form_unchecked(s.g, s.j_plus);
  TensorField wm = kahler_form_unchecked(gm, s.j_minus);
  r.r1 = max_difference(d_c(wp, s.j_plus), s.h);
  TensorField t = d_c(wm, s.j_minus);
  t += hm;
  r.r2 = t.max_abs();
  r.r3 = exterior_derivative(s.h).max_abs();
  return r;
}

}  // namespace gkflow
