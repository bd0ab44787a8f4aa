#include "gkflow/gauge_transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gkflow {

std::vector<int> TimeDependentField::active_axes() const {
  std::vector<int> a(dim());
  std::iota(a.begin(), a.end(), 0);
  return a;
}

std::vector<int> active_axes(const TensorField& t, double rel_tol) {
  std::vector<int> out;
  const auto& b = *t.backend();
  if (!b.is_torus()) return out;
  const TorusChart& chart = b.torus();
  const std::size_t nc = t.components();
  const double tol = rel_tol * t.max_abs();
  for (int a = 0; a < chart.dim(); ++a) {
    bool constant = true;
    for (std::size_t p = 0; p < t.num_points() && constant; ++p) {
      const std::size_t q = chart.shift(p, a, 1);
      auto u = t.at(p);
      auto v = t.at(q);
      for (std::size_t c = 0; c < nc; ++c)
        if (std::abs(u[c] - v[c]) > tol) {
          constant = false;
          break;
        }
    }
    if (!constant) out.push_back(a);
  }
  return out;
}

void interpolate_components(const TensorField& f, std::span<const double> x, const std::vector<int>& axes,
                            std::span<double> value, std::span<double> grad) {
  const TorusChart& chart = f.backend()->torus();
  const int dim = chart.dim();
  const std::size_t nc = f.components();
  std::fill(value.begin(), value.end(), 0.0);
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  const int na = static_cast<int>(axes.size());
  if (na == 0) {
    auto v = f.at(0);
    std::copy(v.begin(), v.end(), value.begin());
    return;
  }
  std::vector<std::vector<double>> w(na), dw(na);
  for (int q = 0; q < na; ++q) {
    const int a = axes[q];
    w[q].resize(chart.resolution()[a]);
    chart.interpolation_weights(a, x[a], w[q]);
    if (want_grad) {
      dw[q].resize(chart.resolution()[a]);
      chart.interpolation_weight_derivatives(a, x[a], dw[q]);
    }
  }
  std::vector<int> idx(na, 0);
  std::vector<double> partial(na);
  while (true) {
    std::size_t p = 0;
    double wt = 1.0;
    for (int q = 0; q < na; ++q) {
      p += static_cast<std::size_t>(idx[q]) * chart.stride(axes[q]);
      wt *= w[q][idx[q]];
    }
    auto v = f.at(p);
    for (std::size_t c = 0; c < nc; ++c) value[c] += wt * v[c];
    if (want_grad) {
      for (int q = 0; q < na; ++q) {
        double d = dw[q][idx[q]];
        for (int r = 0; r < na; ++r)
          if (r != q) d *= w[r][idx[r]];
        partial[q] = d;
      }
      for (std::size_t c = 0; c < nc; ++c)
        for (int q = 0; q < na; ++q) grad[c * dim + axes[q]] += partial[q] * v[c];
    }
    int q = na - 1;
    while (q >= 0) {
      if (++idx[q] < chart.resolution()[axes[q]]) break;
      idx[q] = 0;
      --q;
    }
    if (q < 0) break;
  }
}

SampledVectorField::SampledVectorField(std::vector<double> times, std::vector<TensorField> samples, double scale)
    : times_(std::move(times)), samples_(std::move(samples)), scale_(scale) {
  if (times_.empty() || times_.size() != samples_.size())
    throw std::invalid_argument("sampled vector field: times and samples must match and be non-empty");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1])) throw std::invalid_argument("sampled vector field: times must increase");
  dim_ = samples_.front().dim();
  if (backend()->is_torus()) {
    std::vector<bool> act(dim_, false);
    for (const auto& s : samples_)
      for (int a : gkflow::active_axes(s)) act[a] = true;
    for (int a = 0; a < dim_; ++a)
      if (act[a]) active_.push_back(a);
  }
}

void SampledVectorField::evaluate(double t, std::span<const double> x, std::span<double> value,
                                  std::span<double> jac) const {
  const std::size_t ns = times_.size();
  // Lagrange stencil of up to four samples around t.
  std::size_t k = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  k = k == 0 ? 0 : k - 1;
  const std::size_t width = std::min<std::size_t>(4, ns);
  std::size_t lo = k >= 1 ? k - 1 : 0;
  if (lo + width > ns) lo = ns - width;
  std::vector<double> lw(width, 1.0);
  for (std::size_t a = 0; a < width; ++a)
    for (std::size_t b = 0; b < width; ++b)
      if (a != b) lw[a] *= (t - times_[lo + b]) / (times_[lo + a] - times_[lo + b]);
  std::fill(value.begin(), value.end(), 0.0);
  if (!jac.empty()) std::fill(jac.begin(), jac.end(), 0.0);
  const bool torus = backend()->is_torus();
  std::vector<double> v(dim_), g(static_cast<std::size_t>(dim_) * dim_);
  for (std::size_t a = 0; a < width; ++a) {
    const TensorField& f = samples_[lo + a];
    if (torus) {
      interpolate_components(f, x, active_, v, jac.empty() ? std::span<double>() : std::span<double>(g));
    } else {
      auto s = f.at(0);
      std::copy(s.begin(), s.end(), v.begin());
      std::fill(g.begin(), g.end(), 0.0);
    }
    const double c = lw[a] * scale_;
    for (int i = 0; i < dim_; ++i) value[i] += c * v[i];
    if (!jac.empty())
      for (std::size_t i = 0; i < g.size(); ++i) jac[i] += c * g[i];
  }
}

DiffeoFlow::DiffeoFlow(BackendPtr backend, std::vector<double> times)
    : backend_(std::move(backend)), times_(std::move(times)) {
  const int n = backend_->dim();
  const std::size_t np = backend_->num_points();
  pos_.assign(times_.size(), std::vector<double>(np * n, 0.0));
  jac_.assign(times_.size(), std::vector<double>(np * n * n, 0.0));
  for (std::size_t k = 0; k < times_.size(); ++k)
    for (std::size_t p = 0; p < np; ++p) {
      if (backend_->is_torus()) {
        auto x = backend_->torus().coordinates(p);
        std::copy(x.begin(), x.end(), pos_[k].begin() + p * n);
      }
      for (int i = 0; i < n; ++i) jac_[k][p * n * n + i * n + i] = 1.0;
    }
  if (backend_->is_torus()) {
    active_.resize(n);
    std::iota(active_.begin(), active_.end(), 0);
  }
}

std::span<const double> DiffeoFlow::position(std::size_t k, std::size_t p) const {
  const std::size_t n = dim();
  return {pos_[k].data() + p * n, n};
}
std::span<double> DiffeoFlow::position(std::size_t k, std::size_t p) {
  const std::size_t n = dim();
  return {pos_[k].data() + p * n, n};
}
std::span<const double> DiffeoFlow::jacobian(std::size_t k, std::size_t p) const {
  const std::size_t n = dim();
  return {jac_[k].data() + p * n * n, n * n};
}
std::span<double> DiffeoFlow::jacobian(std::size_t k, std::size_t p) {
  const std::size_t n = dim();
  return {jac_[k].data() + p * n * n, n * n};
}

double DiffeoFlow::min_jacobian_determinant() const {
  const int n = dim();
  double lo = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd m(n, n);
  for (std::size_t k = 0; k < num_times(); ++k)
    for (std::size_t p = 0; p < backend_->num_points(); ++p) {
      auto j = jacobian(k, p);
      for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) m(a, i) = j[a * n + i];
      lo = std::min(lo, m.determinant());
    }
  return lo;
}

namespace {

// y = (φ, dφ) for one particle; dy = (X, ∂X dφ).
void particle_rhs(const TimeDependentField& x, double t, const std::vector<double>& y, std::vector<double>& dy,
                  int n, std::vector<double>& v, std::vector<double>& g) {
  x.evaluate(t, std::span<const double>(y.data(), n), v, g);
  for (int i = 0; i < n; ++i) dy[i] = v[i];
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b) acc += g[a * n + b] * y[n + b * n + i];
      dy[n + a * n + i] = acc;
    }
}

void rk4_particle(const TimeDependentField& x, double t, double h, std::vector<double>& y, int n) {
  const std::size_t m = y.size();
  std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m), v(n), g(static_cast<std::size_t>(n) * n);
  particle_rhs(x, t, y, k1, n, v, g);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  particle_rhs(x, t + 0.5 * h, tmp, k2, n, v, g);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  particle_rhs(x, t + 0.5 * h, tmp, k3, n, v, g);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
  particle_rhs(x, t + h, tmp, k4, n, v, g);
  for (std::size_t i = 0; i < m; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void rk4_frame(const FrameAlgebra& alg, const TimeDependentField& x, double t, double h, Eigen::MatrixXd& mtx) {
  const int n = alg.dim();
  std::vector<double> v(n);
  auto f = [&](double tt, const Eigen::MatrixXd& m) {
    x.evaluate(tt, {}, v, {});
    return Eigen::MatrixXd(-alg.ad(v) * m);
  };
  Eigen::MatrixXd k1 = f(t, mtx);
  Eigen::MatrixXd k2 = f(t + 0.5 * h, mtx + 0.5 * h * k1);
  Eigen::MatrixXd k3 = f(t + 0.5 * h, mtx + 0.5 * h * k2);
  Eigen::MatrixXd k4 = f(t + h, mtx + h * k3);
  mtx += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<std::size_t> stored_indices(std::size_t count, std::size_t stride) {
  std::vector<std::size_t> keep;
  stride = std::max<std::size_t>(1, stride);
  for (std::size_t k = 0; k < count; k += stride) keep.push_back(k);
  if (keep.back() != count - 1) keep.push_back(count - 1);
  return keep;
}

}  // namespace

DiffeoFlow integrate_diffeo(const TimeDependentField& x, const BackendPtr& backend, const std::vector<double>& times,
                            const DiffeoOptions& opt) {
  if (times.empty()) throw std::invalid_argument("integrate_diffeo: empty time grid");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("integrate_diffeo: times must increase");
  if (x.dim() != backend->dim()) throw std::invalid_argument("integrate_diffeo: dimension mismatch");
  const int n = backend->dim();
  const int sub = std::max(1, opt.substeps);
  const auto keep = stored_indices(times.size(), opt.store_stride);
  std::vector<double> kept_times;
  for (auto k : keep) kept_times.push_back(times[k]);
  DiffeoFlow flow(backend, kept_times);

  if (backend->is_frame()) {
    const FrameAlgebra& alg = backend->frame();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    std::size_t out = 1;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      const double h = (times[k + 1] - times[k]) / sub;
      for (int s = 0; s < sub; ++s) rk4_frame(alg, x, times[k] + s * h, h, m);
      if (out < keep.size() && keep[out] == k + 1) {
        auto j = flow.jacobian(out, 0);
        for (int a = 0; a < n; ++a)
          for (int i = 0; i < n; ++i) j[a * n + i] = m(a, i);
        ++out;
      }
    }
    return flow;
  }

  const TorusChart& chart = backend->torus();
  std::vector<int> act = x.active_axes();
  flow.set_active_axes(act);
  std::vector<bool> is_active(n, false);
  for (int a : act) is_active[a] = true;
  std::vector<std::size_t> reps;
  for (std::size_t p = 0; p < chart.num_points(); ++p) {
    auto mi = chart.multi_index(p);
    bool rep = true;
    for (int a = 0; a < n; ++a)
      if (!is_active[a] && mi[a] != 0) rep = false;
    if (rep) reps.push_back(p);
  }
  const std::size_t probe_stride = std::max<std::size_t>(1, reps.size() / 32);
  const double bound = opt.error_bound * chart.min_spacing();
  double max_err = 0.0;
  const std::size_t m = static_cast<std::size_t>(n) + static_cast<std::size_t>(n) * n;
  std::vector<std::vector<double>> rep_pos(keep.size(), std::vector<double>(reps.size() * n));
  std::vector<std::vector<double>> rep_jac(keep.size(), std::vector<double>(reps.size() * n * n));
  for (std::size_t r = 0; r < reps.size(); ++r) {
    std::vector<double> y(m, 0.0);
    auto x0 = chart.coordinates(reps[r]);
    for (int i = 0; i < n; ++i) {
      y[i] = x0[i];
      y[n + i * n + i] = 1.0;
    }
    std::copy(y.begin(), y.begin() + n, rep_pos[0].begin() + r * n);
    std::copy(y.begin() + n, y.end(), rep_jac[0].begin() + r * n * n);
    std::size_t out = 1;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      const double h = (times[k + 1] - times[k]) / sub;
      for (int s = 0; s < sub; ++s) {
        const double t = times[k] + s * h;
        if (opt.error_check && r % probe_stride == 0) {
          std::vector<double> half = y;
          rk4_particle(x, t, 0.5 * h, half, n);
          rk4_particle(x, t + 0.5 * h, 0.5 * h, half, n);
          rk4_particle(x, t, h, y, n);
          double e = 0.0;
          for (int i = 0; i < n; ++i) e = std::max(e, std::abs(half[i] - y[i]));
          max_err = std::max(max_err, e);
          if (e > bound)
            throw TransportError("integrate_diffeo: step error estimate " + std::to_string(e) +
                                 " exceeds bound " + std::to_string(bound));
        } else {
          rk4_particle(x, t, h, y, n);
        }
      }
      if (out < keep.size() && keep[out] == k + 1) {
        for (double v : y)
          if (!std::isfinite(v)) throw TransportError("integrate_diffeo: non-finite particle state");
        std::copy(y.begin(), y.begin() + n, rep_pos[out].begin() + r * n);
        std::copy(y.begin() + n, y.end(), rep_jac[out].begin() + r * n * n);
        ++out;
      }
    }
  }
  flow.set_max_step_error(max_err);
  // Replicate along inactive axes: translation of the representative.
  std::vector<std::size_t> rep_of(chart.num_points());
  for (std::size_t p = 0; p < chart.num_points(); ++p) {
    auto mi = chart.multi_index(p);
    std::size_t q = p;
    for (int a = 0; a < n; ++a)
      if (!is_active[a]) q -= static_cast<std::size_t>(mi[a]) * chart.stride(a);
    rep_of[p] = q;
  }
  std::vector<std::size_t> rep_slot(chart.num_points(), 0);
  for (std::size_t r = 0; r < reps.size(); ++r) rep_slot[reps[r]] = r;
  for (std::size_t k = 0; k < keep.size(); ++k)
    for (std::size_t p = 0; p < chart.num_points(); ++p) {
      const std::size_t r = rep_slot[rep_of[p]];
      auto xp = chart.coordinates(p);
      auto xr = chart.coordinates(rep_of[p]);
      auto pos = flow.position(k, p);
      auto jac = flow.jacobian(k, p);
      for (int i = 0; i < n; ++i) pos[i] = rep_pos[k][r * n + i] + (xp[i] - xr[i]);
      std::copy(rep_jac[k].begin() + r * n * n, rep_jac[k].begin() + (r + 1) * n * n, jac.begin());
    }
  return flow;
}

namespace {

void transform_point(const TensorField& t, std::span<const double> val, const Eigen::MatrixXd& m,
                     const Eigen::MatrixXd& minv, std::span<double> out, std::vector<double>& buf) {
  const int n = t.dim();
  const int r = t.rank();
  const std::size_t nc = t.components();
  std::vector<double> cur(val.begin(), val.end());
  buf.resize(nc);
  std::size_t st = nc;
  for (int q = 0; q < r; ++q) {
    st /= static_cast<std::size_t>(n);
    for (std::size_t c = 0; c < nc; ++c) {
      const int i = static_cast<int>((c / st) % n);
      const std::size_t base = c - static_cast<std::size_t>(i) * st;
      double acc = 0.0;
      if (t.slots()[q] == Index::Lower) {
        for (int a = 0; a < n; ++a) acc += m(a, i) * cur[base + a * st];
      } else {
        for (int a = 0; a < n; ++a) acc += minv(i, a) * cur[base + a * st];
      }
      buf[c] = acc;
    }
    std::swap(cur, buf);
  }
  std::copy(cur.begin(), cur.end(), out.begin());
}

}  // namespace

TensorField pullback_by_map(const BackendPtr& backend, const std::vector<double>& positions,
                            const std::vector<double>& jacobians, const std::vector<int>& map_axes,
                            const TensorField& t) {
  if (t.backend() != backend) throw std::invalid_argument("pullback: backend mismatch");
  const int n = backend->dim();
  TensorField out(backend, t.slots(), t.symmetry());
  const std::size_t nc = t.components();
  std::vector<double> val(nc), buf;
  Eigen::MatrixXd m(n, n);
  auto load = [&](std::size_t p) {
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) m(a, i) = jacobians[p * n * n + a * n + i];
  };
  if (backend->is_frame()) {
    load(0);
    Eigen::MatrixXd minv = m.inverse();
    transform_point(t, t.at(0), m, minv, out.at(0), buf);
    return out;
  }
  const TorusChart& chart = backend->torus();
  std::vector<int> fa = active_axes(t);
  std::vector<bool> act(n, false);
  for (int a : fa) act[a] = true;
  for (int a : map_axes) act[a] = true;
  // Points that differ only along axes inactive for both the field and the
  // map share the pulled-back value.
  std::vector<std::size_t> rep_of(chart.num_points());
  for (std::size_t p = 0; p < chart.num_points(); ++p) {
    auto mi = chart.multi_index(p);
    std::size_t q = p;
    for (int a = 0; a < n; ++a)
      if (!act[a]) q -= static_cast<std::size_t>(mi[a]) * chart.stride(a);
    rep_of[p] = q;
  }
  for (std::size_t p = 0; p < chart.num_points(); ++p) {
    if (rep_of[p] != p) continue;
    interpolate_components(t, std::span<const double>(positions.data() + p * n, n), fa, val);
    load(p);
    Eigen::MatrixXd minv = m.inverse();
    transform_point(t, val, m, minv, out.at(p), buf);
  }
  for (std::size_t p = 0; p < chart.num_points(); ++p) {
    if (rep_of[p] == p) continue;
    auto src = out.at(rep_of[p]);
    std::copy(src.begin(), src.end(), out.at(p).begin());
  }
  return out;
}

TensorField pullback(const DiffeoFlow& phi, std::size_t k, const TensorField& t) {
  if (k >= phi.num_times()) throw std::out_of_range("pullback: time index out of range");
  const int n = phi.dim();
  const std::size_t np = phi.backend()->num_points();
  std::vector<double> pos(np * n), jac(np * n * n);
  for (std::size_t p = 0; p < np; ++p) {
    auto a = phi.position(k, p);
    auto b = phi.jacobian(k, p);
    std::copy(a.begin(), a.end(), pos.begin() + p * n);
    std::copy(b.begin(), b.end(), jac.begin() + p * n * n);
  }
  return pullback_by_map(phi.backend(), pos, jac, phi.active_axes(), t);
}

}  // namespace gkflow
