#include "gkflow/forms.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gkflow {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::size_t ipow(int n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

void require_form(const TensorField& a, const char* who) {
  for (Index s : a.slots())
    if (s != Index::Lower) throw std::invalid_argument(std::string(who) + ": expected a differential form");
}

}  // namespace

TensorField frame_derivative(const TensorField& t) {
  std::vector<Index> slots{Index::Lower};
  slots.insert(slots.end(), t.slots().begin(), t.slots().end());
  TensorField out(t.backend(), slots);
  const auto& b = *t.backend();
  if (b.is_frame()) return out;
  const TorusChart& chart = b.torus();
  const int n = t.dim();
  const std::size_t nc = t.components();
  std::vector<double> tmp(t.values().size());
  for (int a = 0; a < n; ++a) {
    chart.differentiate(a, t.values(), tmp, nc);
    for (std::size_t p = 0; p < t.num_points(); ++p) {
      auto o = out.at(p);
      const double* s = &tmp[p * nc];
      std::copy(s, s + nc, o.begin() + a * nc);
    }
  }
  return out;
}

TensorField contract_slot(const TensorField& t, int slot, const TensorField& m, Index variance) {
  if (slot < 0 || slot >= t.rank()) throw std::invalid_argument("contract_slot: bad slot");
  if (m.rank() != 2) throw std::invalid_argument("contract_slot: matrix field must have rank 2");
  std::vector<Index> slots = t.slots();
  slots[slot] = variance;
  bool uniform = true;
  for (Index s : slots) uniform = uniform && s == slots.front();
  TensorField out(t.backend(), slots, uniform ? t.symmetry() : Symmetry::None);
  const int n = t.dim();
  const std::size_t nc = t.components();
  const std::size_t st = ipow(n, t.rank() - 1 - slot);
  const std::size_t block = st * static_cast<std::size_t>(n);
  const std::size_t nouter = nc / block;
  for (std::size_t p = 0; p < t.num_points(); ++p) {
    auto mv = m.at(p);
    auto tv = t.at(p);
    auto o = out.at(p);
    for (std::size_t u = 0; u < nouter; ++u) {
      const double* src = &tv[u * block];
      double* dst = &o[u * block];
      for (int i = 0; i < n; ++i) {
        double* di = dst + i * st;
        for (std::size_t v = 0; v < st; ++v) di[v] = 0.0;
        for (int j = 0; j < n; ++j) {
          const double w = mv[i * n + j];
          if (w == 0.0) continue;
          const double* sj = src + j * st;
          for (std::size_t v = 0; v < st; ++v) di[v] += w * sj[v];
        }
      }
    }
  }
  return out;
}

TensorField raise_all(const Metric& g, const TensorField& t) {
  TensorField r = t;
  for (int s = 0; s < t.rank(); ++s)
    if (t.slots()[s] == Index::Lower) r = contract_slot(r, s, g.inverse(), Index::Upper);
  return r;
}

TensorField lower_all(const Metric& g, const TensorField& t) {
  TensorField r = t;
  for (int s = 0; s < t.rank(); ++s)
    if (t.slots()[s] == Index::Upper) r = contract_slot(r, s, g.tensor(), Index::Lower);
  return r;
}

TensorField exterior_derivative(const TensorField& alpha) {
  require_form(alpha, "exterior_derivative");
  const int k = alpha.rank();
  const int n = alpha.dim();
  if (k + 1 > n) throw std::invalid_argument("exterior_derivative: degree overflow");
  TensorField out = TensorField::form(alpha.backend(), k + 1);
  const auto& b = *alpha.backend();
  const bool torus = b.is_torus();
  TensorField da;
  if (torus) da = frame_derivative(alpha);
  const std::size_t nc_in = alpha.components();
  // Point-independent table: output component c is Σ coef·src[offset].
  struct Term {
    std::size_t offset;
    double coef;
  };
  std::vector<std::vector<Term>> terms(out.components());
  std::vector<int> idx(k + 1), rest(k > 0 ? k : 1), rest2(k > 1 ? k - 1 : 1), full(k);
  for (std::size_t c = 0; c < out.components(); ++c) {
    out.unflatten(c, idx);
    if (torus) {
      for (int i = 0; i <= k; ++i) {
        int q = 0;
        for (int r = 0; r <= k; ++r)
          if (r != i) rest[q++] = idx[r];
        const std::size_t f = k > 0 ? alpha.flat(std::span<const int>(rest.data(), k)) : 0;
        terms[c].push_back({idx[i] * nc_in + f, (i % 2) ? -1.0 : 1.0});
      }
    } else if (k > 0) {
      for (int i = 0; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j) {
          int q = 0;
          for (int r = 0; r <= k; ++r)
            if (r != i && r != j) rest2[q++] = idx[r];
          const double sgn = ((i + j) % 2) ? -1.0 : 1.0;
          for (int m = 0; m < n; ++m) {
            const double cm = b.structure_constant(m, idx[i], idx[j]);
            if (cm == 0.0) continue;
            full[0] = m;
            for (int r = 0; r < k - 1; ++r) full[r + 1] = rest2[r];
            terms[c].push_back({alpha.flat(full), sgn * cm});
          }
        }
    }
  }
  for (std::size_t p = 0; p < alpha.num_points(); ++p) {
    auto src = torus ? da.at(p) : alpha.at(p);
    auto o = out.at(p);
    for (std::size_t c = 0; c < terms.size(); ++c) {
      double acc = 0.0;
      for (const Term& t : terms[c]) acc += t.coef * src[t.offset];
      o[c] = acc;
    }
  }
  return out;
}

TensorField wedge(const TensorField& a, const TensorField& b) {
  require_form(a, "wedge");
  require_form(b, "wedge");
  const int k = a.rank(), l = b.rank();
  if (k + l > a.dim()) throw std::invalid_argument("wedge: degree overflow");
  TensorField out = TensorField::form(a.backend(), k + l);
  const auto& perms = permutations(k + l);
  const double norm = 1.0 / (factorial(k) * factorial(l));
  std::vector<int> idx(k + l), ia(k), ib(l);
  for (std::size_t p = 0; p < out.num_points(); ++p) {
    auto av = a.at(p);
    auto bv = b.at(p);
    auto o = out.at(p);
    for (std::size_t c = 0; c < out.components(); ++c) {
      out.unflatten(c, idx);
      double acc = 0.0;
      for (const auto& perm : perms) {
        for (int r = 0; r < k; ++r) ia[r] = idx[perm.map[r]];
        for (int r = 0; r < l; ++r) ib[r] = idx[perm.map[k + r]];
        acc += perm.sign * av[a.flat(ia)] * bv[b.flat(ib)];
      }
      o[c] = acc * norm;
    }
  }
  return out;
}

TensorField hodge_star(const Metric& g, const TensorField& alpha) {
  require_form(alpha, "hodge_star");
  const int n = alpha.dim();
  const int k = alpha.rank();
  TensorField up = raise_all(g, alpha);
  TensorField out = TensorField::form(alpha.backend(), n - k);
  const auto& perms = permutations(n);
  const double inv_kf = 1.0 / factorial(k);
  std::vector<int> ii(k), jj(n - k);
  // Precompute flat positions per permutation.
  std::vector<std::size_t> fi(perms.size()), fj(perms.size());
  for (std::size_t s = 0; s < perms.size(); ++s) {
    for (int r = 0; r < k; ++r) ii[r] = perms[s].map[r];
    for (int r = 0; r < n - k; ++r) jj[r] = perms[s].map[k + r];
    fi[s] = up.flat(ii);
    fj[s] = out.flat(jj);
  }
  for (std::size_t p = 0; p < out.num_points(); ++p) {
    auto uv = up.at(p);
    auto o = out.at(p);
    const double vol = g.volume_density()(p, 0) * inv_kf;
    for (std::size_t s = 0; s < perms.size(); ++s) o[fj[s]] += perms[s].sign * uv[fi[s]] * vol;
  }
  return out;
}

TensorField codifferential(const Metric& g, const TensorField& alpha) {
  require_form(alpha, "codifferential");
  const int k = alpha.rank();
  const int n = alpha.dim();
  if (k == 0) throw std::invalid_argument("codifferential: degree must be at least 1");
  TensorField r = hodge_star(g, exterior_derivative(hodge_star(g, alpha)));
  const int e = n * (k + 1) + 1;
  if (e % 2) r *= -1.0;
  return r;
}

TensorField laplace_beltrami(const Metric& g, const TensorField& alpha) {
  require_form(alpha, "laplace_beltrami");
  const int k = alpha.rank();
  const int n = alpha.dim();
  TensorField out = TensorField::form(alpha.backend(), k);
  if (k >= 1) out -= exterior_derivative(codifferential(g, alpha));
  if (k + 1 <= n) out -= codifferential(g, exterior_derivative(alpha));
  return out;
}

TensorField tensor_inner_pointwise(const Metric& g, const TensorField& a, const TensorField& b) {
  if (a.slots() != b.slots()) throw std::invalid_argument("tensor_inner: slot mismatch");
  // Flip every slot of b to the opposite variance.
  TensorField bb = b;
  for (int s = 0; s < b.rank(); ++s) {
    if (b.slots()[s] == Index::Lower)
      bb = contract_slot(bb, s, g.inverse(), Index::Upper);
    else
      bb = contract_slot(bb, s, g.tensor(), Index::Lower);
  }
  TensorField out = TensorField::scalar(a.backend());
  for (std::size_t p = 0; p < out.num_points(); ++p) {
    auto av = a.at(p);
    auto bv = bb.at(p);
    double acc = 0.0;
    for (std::size_t c = 0; c < av.size(); ++c) acc += av[c] * bv[c];
    out(p, 0) = acc;
  }
  return out;
}

TensorField form_inner_pointwise(const Metric& g, const TensorField& a, const TensorField& b) {
  require_form(a, "form_inner");
  require_form(b, "form_inner");
  TensorField r = tensor_inner_pointwise(g, a, b);
  r *= 1.0 / factorial(a.rank());
  return r;
}

double integrate(const Metric& g, const TensorField& f) {
  if (f.rank() != 0) throw std::invalid_argument("integrate: expected a scalar field");
  double acc = 0.0;
  for (std::size_t p = 0; p < f.num_points(); ++p) acc += f(p, 0) * g.volume_density()(p, 0);
  return acc * g.backend()->sample_volume();
}

double l2_inner(const Metric& g, const TensorField& a, const TensorField& b) {
  if (a.rank() != b.rank()) throw std::invalid_argument("l2_inner: degree mismatch");
  return integrate(g, form_inner_pointwise(g, a, b));
}

double l2_norm(const Metric& g, const TensorField& a) { return std::sqrt(std::max(0.0, l2_inner(g, a, a))); }

}  // namespace gkflow
