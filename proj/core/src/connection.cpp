#include "gkflow/connection.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gkflow/forms.hpp"

namespace gkflow {

namespace {

void require_connection(const TensorField& gamma) {
  const auto& s = gamma.slots();
  if (s.size() != 3 || s[0] != Index::Lower || s[1] != Index::Lower || s[2] != Index::Upper)
    throw std::invalid_argument("expected connection coefficients (L, L, U)");
}

}  // namespace

TensorField levi_civita(const Metric& g) {
  const int n = g.dim();
  const auto& b = *g.backend();
  TensorField dg = frame_derivative(g.tensor());
  TensorField lower(g.backend(), {Index::Lower, Index::Lower, Index::Lower});
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  const bool brackets = b.has_brackets();
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    auto gv = g.tensor().at(p);
    auto dv = dg.at(p);
    auto o = lower.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double v = dv[i * n2 + j * n + l] + dv[j * n2 + i * n + l] - dv[l * n2 + i * n + j];
          if (brackets) {
            for (int m = 0; m < n; ++m) {
              v += b.structure_constant(m, i, j) * gv[m * n + l] - b.structure_constant(m, i, l) * gv[m * n + j] -
                   b.structure_constant(m, j, l) * gv[m * n + i];
            }
          }
          o[(i * n + j) * n + l] = 0.5 * v;
        }
  }
  return contract_slot(lower, 2, g.inverse(), Index::Upper);
}

TensorField reference_connection(const BackendPtr& backend) {
  TensorField gamma(backend, {Index::Lower, Index::Lower, Index::Upper});
  if (backend->is_torus()) return gamma;
  const int n = backend->dim();
  for (std::size_t p = 0; p < gamma.num_points(); ++p) {
    auto o = gamma.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) o[(i * n + j) * n + k] = 0.5 * backend->structure_constant(k, i, j);
  }
  return gamma;
}

TensorField torsion(const TensorField& gamma) {
  require_connection(gamma);
  const int n = gamma.dim();
  const auto& b = *gamma.backend();
  TensorField out = gamma;
  for (std::size_t p = 0; p < gamma.num_points(); ++p) {
    auto gv = gamma.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          o[(i * n + j) * n + k] = gv[(i * n + j) * n + k] - gv[(j * n + i) * n + k] - b.structure_constant(k, i, j);
  }
  return out;
}

TensorField covariant_derivative(const TensorField& gamma, const TensorField& t) {
  require_connection(gamma);
  const int n = t.dim();
  const int r = t.rank();
  TensorField out = frame_derivative(t);
  const std::size_t nc = t.components();
  std::vector<std::size_t> strides(r);
  {
    std::size_t s = 1;
    for (int q = r - 1; q >= 0; --q) {
      strides[q] = s;
      s *= static_cast<std::size_t>(n);
    }
  }
  // (slot, index, base) of every component, independent of the point.
  struct Entry {
    int iq;
    std::size_t base, st;
    bool lower;
  };
  std::vector<Entry> table(nc * r);
  for (std::size_t c = 0; c < nc; ++c)
    for (int q = 0; q < r; ++q) {
      const std::size_t st = strides[q];
      const int iq = static_cast<int>((c / st) % n);
      table[c * r + q] = {iq, c - static_cast<std::size_t>(iq) * st, st, t.slots()[q] == Index::Lower};
    }
  for (std::size_t p = 0; p < t.num_points(); ++p) {
    auto gv = gamma.at(p);
    auto tv = t.at(p);
    auto o = out.at(p);
    for (int a = 0; a < n; ++a) {
      double* oa = &o[a * nc];
      const double* ga = &gv[a * n * n];
      for (std::size_t c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (int q = 0; q < r; ++q) {
          const Entry& e = table[c * r + q];
          if (e.lower) {
            // − Γ^m_{a iq} T[..m..]
            for (int m = 0; m < n; ++m) acc -= ga[e.iq * n + m] * tv[e.base + m * e.st];
          } else {
            // + Γ^{iq}_{a m} T[..m..]
            for (int m = 0; m < n; ++m) acc += ga[m * n + e.iq] * tv[e.base + m * e.st];
          }
        }
        oa[c] += acc;
      }
    }
  }
  return out;
}

TensorField covariant_derivative(const Metric& g, const TensorField& t) {
  return covariant_derivative(levi_civita(g), t);
}

TensorField riemann_from_connection(const TensorField& gamma) {
  require_connection(gamma);
  const int n = gamma.dim();
  const auto& b = *gamma.backend();
  TensorField dgam = frame_derivative(gamma);  // [a][j][k][l] = e_a Γ^l_{jk}
  TensorField out(gamma.backend(), {Index::Lower, Index::Lower, Index::Lower, Index::Upper});
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
  auto G = [n](std::span<const double> v, int j, int k, int l) { return v[(j * n + k) * n + l]; };
  for (std::size_t p = 0; p < gamma.num_points(); ++p) {
    auto gv = gamma.at(p);
    auto dv = dgam.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = dv[i * n3 + (j * n + k) * n + l] - dv[j * n3 + (i * n + k) * n + l];
            for (int m = 0; m < n; ++m) {
              v += G(gv, j, k, m) * G(gv, i, m, l) - G(gv, i, k, m) * G(gv, j, m, l) -
                   b.structure_constant(m, i, j) * G(gv, m, k, l);
            }
            o[((i * n + j) * n + k) * n + l] = v;
            o[((j * n + i) * n + k) * n + l] = -v;
          }
  }
  return out;
}

TensorField riemann(const Metric& g) { return riemann_from_connection(levi_civita(g)); }

TensorField ricci_from_riemann(const TensorField& rm) {
  const int n = rm.dim();
  TensorField out(rm.backend(), {Index::Lower, Index::Lower});
  for (std::size_t p = 0; p < rm.num_points(); ++p) {
    auto rv = rm.at(p);
    auto o = out.at(p);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += rv[((i * n + j) * n + k) * n + i];
        o[j * n + k] = acc;
      }
  }
  return out;
}

TensorField ricci(const Metric& g) {
  const TensorField gamma = levi_civita(g);
  TensorField rc = ricci_from_riemann(riemann_from_connection(gamma));
  if (!g.backend()->is_torus()) return rc;
  // Replace −∂_j Γ^i_{ik} by −∂_j ∂_k log√det g; discrete derivatives commute,
  // so Rc is symmetric by construction.
  const int n = g.dim();
  TensorField trace = TensorField(g.backend(), {Index::Lower});
  TensorField psi = TensorField::scalar(g.backend());
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += gamma(p, (i * n + k) * n + i);
      trace(p, k) = acc;
    }
    psi(p, 0) = std::log(g.volume_density()(p, 0));
  }
  rc += frame_derivative(trace);
  rc -= frame_derivative(frame_derivative(psi));
  return rc;
}

namespace {
TensorField trace2(const Metric& g, const TensorField& t) {
  const int n = g.dim();
  TensorField out = TensorField::scalar(g.backend());
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    auto iv = g.inverse().at(p);
    auto tv = t.at(p);
    double acc = 0.0;
    for (int c = 0; c < n * n; ++c) acc += iv[c] * tv[c];
    out(p, 0) = acc;
  }
  return out;
}
}  // namespace

TensorField scalar_curvature(const Metric& g) { return trace2(g, ricci(g)); }

CurvatureInvariants curvature_invariants(const Metric& g) {
  TensorField rm = riemann(g);
  TensorField rc = symmetrize2(ricci_from_riemann(rm));
  CurvatureInvariants out;
  out.scal = trace2(g, rc);
  out.rc_norm2 = tensor_inner_pointwise(g, rc, rc);
  out.rm_norm2 = tensor_inner_pointwise(g, rm, rm);
  return out;
}

TensorField lie_derivative(const TensorField& x, const TensorField& t) {
  if (x.rank() != 1 || x.slots()[0] != Index::Upper)
    throw std::invalid_argument("lie_derivative: X must be a vector field");
  const int n = t.dim();
  const int r = t.rank();
  TensorField gamma0 = reference_connection(t.backend());
  TensorField dt = covariant_derivative(gamma0, t);  // [p][...]
  TensorField dx = covariant_derivative(gamma0, x);  // [a][b] = D_a X^b
  TensorField out(t.backend(), t.slots(), t.symmetry());
  const std::size_t nc = t.components();
  std::vector<std::size_t> strides(r);
  {
    std::size_t s = 1;
    for (int q = r - 1; q >= 0; --q) {
      strides[q] = s;
      s *= static_cast<std::size_t>(n);
    }
  }
  for (std::size_t p = 0; p < t.num_points(); ++p) {
    auto xv = x.at(p);
    auto dtv = dt.at(p);
    auto dxv = dx.at(p);
    auto tv = t.at(p);
    auto o = out.at(p);
    for (std::size_t c = 0; c < nc; ++c) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) acc += xv[a] * dtv[a * nc + c];
      for (int q = 0; q < r; ++q) {
        const std::size_t st = strides[q];
        const int iq = static_cast<int>((c / st) % n);
        const std::size_t base = c - static_cast<std::size_t>(iq) * st;
        if (t.slots()[q] == Index::Lower) {
          for (int m = 0; m < n; ++m) acc += tv[base + m * st] * dxv[iq * n + m];
        } else {
          for (int m = 0; m < n; ++m) acc -= tv[base + m * st] * dxv[m * n + iq];
        }
      }
      o[c] = acc;
    }
  }
  return out;
}

TensorField h_squared(const Metric& g, const TensorField& h) {
  if (h.rank() != 3) throw std::invalid_argument("h_squared: expected a 3-form");
  const int n = g.dim();
  TensorField up = contract_slot(contract_slot(h, 1, g.inverse(), Index::Upper), 2, g.inverse(), Index::Upper);
  TensorField out = TensorField::symmetric2(g.backend());
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    auto hv = h.at(p);
    auto uv = up.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n2; ++c) acc += hv[i * n2 + c] * uv[j * n2 + c];
        o[i * n + j] = acc;
        o[j * n + i] = acc;
      }
  }
  return out;
}

TensorField deturck_vector_field(const Metric& g, const TensorField& gamma0) {
  const int n = g.dim();
  TensorField gamma = levi_civita(g);
  TensorField out = TensorField::vector(g.backend());
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    auto iv = g.inverse().at(p);
    auto gv = gamma.at(p);
    auto g0 = gamma0.at(p);
    auto o = out.at(p);
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc += iv[i * n + j] * (gv[(i * n + j) * n + k] - g0[(i * n + j) * n + k]);
      o[k] = acc;
    }
  }
  return out;
}

TensorField symmetrize2(const TensorField& t) {
  if (t.rank() != 2) throw std::invalid_argument("symmetrize2: expected rank 2");
  const int n = t.dim();
  TensorField out(t.backend(), t.slots(), t.slots()[0] == t.slots()[1] ? Symmetry::Symmetric : Symmetry::None);
  for (std::size_t p = 0; p < t.num_points(); ++p) {
    auto tv = t.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) o[i * n + j] = 0.5 * (tv[i * n + j] + tv[j * n + i]);
  }
  return out;
}

}  // namespace gkflow
