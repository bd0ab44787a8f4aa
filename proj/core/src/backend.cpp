#include "gkflow/backend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gkflow {

namespace {

std::vector<double> central_weights(int order) {
  switch (order) {
    case 2: return {1.0 / 2.0};
    case 4: return {2.0 / 3.0, -1.0 / 12.0};
    case 6: return {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
    case 8: return {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    default: throw std::invalid_argument("stencil order must be 0, 2, 4, 6 or 8");
  }
}

// Trigonometric differentiation matrix on n equispaced nodes over [0, period).
Eigen::MatrixXd fourier_matrix(int n, double period) {
  constexpr double pi = std::numbers::pi;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const int m = j - k;
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const double arg = m * pi / n;
      const double v = (n % 2 == 0) ? 0.5 * sign / std::tan(arg) : 0.5 * sign / std::sin(arg);
      d(j, k) = v * 2.0 * pi / period;
    }
  }
  return d;
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  theta = std::fmod(theta, two_pi);
  if (theta > std::numbers::pi) theta -= two_pi;
  if (theta <= -std::numbers::pi) theta += two_pi;
  return theta;
}

}  // namespace

TorusChart::TorusChart(std::vector<int> resolution, std::vector<double> periods,
                       int stencil_order)
    : resolution_(std::move(resolution)),
      periods_(std::move(periods)),
      stencil_order_(stencil_order) {
  if (resolution_.empty() || resolution_.size() != periods_.size()) {
    throw std::invalid_argument("torus chart: resolution and periods must match and be non-empty");
  }
  for (std::size_t a = 0; a < resolution_.size(); ++a) {
    const int min_res = stencil_order_ == 0 ? 4 : stencil_order_ + 1;
    if (resolution_[a] < min_res) {
      throw std::invalid_argument("torus chart: resolution " + std::to_string(resolution_[a]) +
                                  " too small for stencil order " + std::to_string(stencil_order_));
    }
    if (!(periods_[a] > 0.0)) throw std::invalid_argument("torus chart: periods must be positive");
  }
  origin_.assign(resolution_.size(), 0.0);
  strides_.assign(resolution_.size(), 1);
  for (int a = dim() - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * resolution_[a + 1];
  num_points_ = strides_[0] * resolution_[0];
  if (stencil_order_ == 0) {
    for (int a = 0; a < dim(); ++a) spectral_diff_.push_back(fourier_matrix(resolution_[a], periods_[a]));
  } else {
    fd_weights_ = central_weights(stencil_order_);
  }
}

TorusChart TorusChart::patch(std::vector<double> center, int half_points, double spacing, int stencil_order) {
  if (stencil_order == 0) throw std::invalid_argument("local patch: spectral differentiation needs a periodic grid");
  if (!(spacing > 0.0)) throw std::invalid_argument("local patch: spacing must be positive");
  const int n = 2 * half_points + 1;
  const std::size_t d = center.size();
  TorusChart c(std::vector<int>(d, n), std::vector<double>(d, n * spacing), stencil_order);
  c.local_patch_ = true;
  for (std::size_t a = 0; a < d; ++a) c.origin_[a] = center[a] - half_points * spacing;
  return c;
}

double TorusChart::min_spacing() const {
  double h = spacing(0);
  for (int a = 1; a < dim(); ++a) h = std::min(h, spacing(a));
  return h;
}

double TorusChart::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

std::vector<int> TorusChart::multi_index(std::size_t point) const {
  std::vector<int> idx(dim());
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(point / strides_[a]);
    point %= strides_[a];
  }
  return idx;
}

std::vector<double> TorusChart::coordinates(std::size_t point) const {
  auto idx = multi_index(point);
  std::vector<double> x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = origin_[a] + idx[a] * spacing(a);
  return x;
}

std::size_t TorusChart::shift(std::size_t point, int axis, int offset) const {
  const int n = resolution_[axis];
  const int i = static_cast<int>((point / strides_[axis]) % n);
  int j = (i + offset) % n;
  if (j < 0) j += n;
  return point + (static_cast<std::ptrdiff_t>(j) - i) * static_cast<std::ptrdiff_t>(strides_[axis]);
}

void TorusChart::differentiate(int axis, std::span<const double> in, std::span<double> out,
                               std::size_t ncomp) const {
  if (in.size() != num_points_ * ncomp || out.size() != in.size()) {
    throw std::invalid_argument("torus chart: differentiate size mismatch");
  }
  const int n = resolution_[axis];
  const std::size_t st = strides_[axis];
  if (spectral()) {
    const Eigen::MatrixXd& d = spectral_diff_[axis];
    std::vector<double> line(static_cast<std::size_t>(n) * ncomp), acc(ncomp);
    for (std::size_t p = 0; p < num_points_; ++p) {
      if ((p / st) % n != 0) continue;  // p is the base of an axis line
      bool constant = true;
      for (int k = 0; k < n; ++k) {
        const double* src = &in[(p + k * st) * ncomp];
        std::copy(src, src + ncomp, &line[k * ncomp]);
        if (constant && k > 0 && !std::equal(src, src + ncomp, &line[0])) constant = false;
      }
      for (int j = 0; j < n; ++j) {
        double* o = &out[(p + j * st) * ncomp];
        if (constant) {
          std::fill(o, o + ncomp, 0.0);
          continue;
        }
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int k = 0; k < n; ++k) {
          const double w = d(j, k);
          const double* l = &line[k * ncomp];
          for (std::size_t c = 0; c < ncomp; ++c) acc[c] += w * l[c];
        }
        std::copy(acc.begin(), acc.end(), o);
      }
    }
    return;
  }
  const double inv_h = 1.0 / spacing(axis);
  const int half = static_cast<int>(fd_weights_.size());
  for (std::size_t p = 0; p < num_points_; ++p) {
    double* o = &out[p * ncomp];
    std::fill(o, o + ncomp, 0.0);
    for (int s = 1; s <= half; ++s) {
      const double w = fd_weights_[s - 1] * inv_h;
      const double* fp = &in[shift(p, axis, s) * ncomp];
      const double* fm = &in[shift(p, axis, -s) * ncomp];
      for (std::size_t c = 0; c < ncomp; ++c) o[c] += w * (fp[c] - fm[c]);
    }
  }
}

double TorusChart::max_wavenumber(int axis) const {
  const int n = resolution_[axis];
  if (spectral()) {
    const int kmax = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
    return kmax * 2.0 * std::numbers::pi / periods_[axis];
  }
  double best = 0.0;
  for (int m = 0; m <= n / 2; ++m) {
    const double theta = 2.0 * std::numbers::pi * m / n;
    double s = 0.0;
    for (std::size_t k = 0; k < fd_weights_.size(); ++k) s += 2.0 * fd_weights_[k] * std::sin((k + 1) * theta);
    best = std::max(best, std::abs(s));
  }
  return best / spacing(axis);
}

void TorusChart::interpolation_weights(int axis, double x, std::span<double> w) const {
  const int n = resolution_[axis];
  const double scale = 2.0 * std::numbers::pi / periods_[axis];
  const bool even = n % 2 == 0;
  const double k2 = even ? (n * n + 2.0) / 12.0 : (n * n - 1.0) / 12.0;
  for (int j = 0; j < n; ++j) {
    const double theta = wrap_angle(scale * (x - origin_[axis] - j * spacing(axis)));
    if (std::abs(theta) < 1e-6) {
      w[j] = 1.0 - 0.5 * k2 * theta * theta;
    } else if (even) {
      w[j] = std::sin(0.5 * n * theta) / (n * std::tan(0.5 * theta));
    } else {
      w[j] = std::sin(0.5 * n * theta) / (n * std::sin(0.5 * theta));
    }
  }
}

void TorusChart::interpolation_weight_derivatives(int axis, double x, std::span<double> dw) const {
  const int n = resolution_[axis];
  const double scale = 2.0 * std::numbers::pi / periods_[axis];
  const bool even = n % 2 == 0;
  const double k2 = even ? (n * n + 2.0) / 12.0 : (n * n - 1.0) / 12.0;
  for (int j = 0; j < n; ++j) {
    const double theta = wrap_angle(scale * (x - origin_[axis] - j * spacing(axis)));
    double d;
    if (std::abs(theta) < 1e-6) {
      d = -k2 * theta;
    } else {
      const double s = std::sin(0.5 * theta);
      const double c = std::cos(0.5 * theta);
      const double sn = std::sin(0.5 * n * theta);
      const double cn = std::cos(0.5 * n * theta);
      if (even) {
        d = (0.5 * n * cn * (c / s) - 0.5 * sn / (s * s)) / n;
      } else {
        d = (0.5 * n * cn * s - 0.5 * sn * c) / (n * s * s);
      }
    }
    dw[j] = d * scale;
  }
}

FrameAlgebra::FrameAlgebra(int dim, std::vector<double> structure_constants,
                           Eigen::MatrixXd frame_metric, std::string label)
    : dim_(dim),
      structure_constants_(std::move(structure_constants)),
      frame_metric_(std::move(frame_metric)),
      label_(std::move(label)) {
  if (dim_ < 1 || structure_constants_.size() != static_cast<std::size_t>(dim_ * dim_ * dim_)) {
    throw std::invalid_argument("frame algebra: structure constants must have dim^3 entries");
  }
  if (frame_metric_.rows() != dim_ || frame_metric_.cols() != dim_) {
    throw std::invalid_argument("frame algebra: frame metric must be dim x dim");
  }
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (c(k, i, j) != -c(k, j, i)) {
          throw std::invalid_argument("frame algebra: structure constants must be antisymmetric");
        }
  if ((frame_metric_ - frame_metric_.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw std::invalid_argument("frame algebra: frame metric must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(frame_metric_);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("frame algebra: frame metric must be positive definite");
  }
  if (jacobi_residual() > 1e-12) throw std::invalid_argument("frame algebra: Jacobi identity fails");
}

double FrameAlgebra::jacobi_residual() const {
  // sum over cyclic (i,j,k) of c^m_{ij} c^l_{mk}
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l) {
          double s = 0.0;
          for (int m = 0; m < dim_; ++m) {
            s += c(m, i, j) * c(l, m, k) + c(m, j, k) * c(l, m, i) + c(m, k, i) * c(l, m, j);
          }
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

Eigen::MatrixXd FrameAlgebra::ad(std::span<const double> x) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int k = 0; k < dim_; ++k)
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i < dim_; ++i) m(k, j) += x[i] * c(k, i, j);
  return m;
}

FrameAlgebra FrameAlgebra::opposite() const {
  std::vector<double> neg(structure_constants_.size());
  std::transform(structure_constants_.begin(), structure_constants_.end(), neg.begin(),
                 [](double v) { return v == 0.0 ? 0.0 : -v; });
  return FrameAlgebra(dim_, std::move(neg), frame_metric_, label_ + "^op");
}

bool FrameAlgebra::unimodular(double tol) const {
  for (int j = 0; j < dim_; ++j) {
    double tr = 0.0;
    for (int k = 0; k < dim_; ++k) tr += c(k, k, j);
    if (std::abs(tr) > tol) return false;
  }
  return true;
}

FrameAlgebra FrameAlgebra::su2(double radius) {
  const int n = 3;
  std::vector<double> cs(n * n * n, 0.0);
  const double s = 2.0 / radius;
  auto set = [&](int k, int i, int j) {
    cs[(k * n + i) * n + j] = s;
    cs[(k * n + j) * n + i] = -s;
  };
  set(2, 0, 1);
  set(0, 1, 2);
  set(1, 2, 0);
  return FrameAlgebra(n, std::move(cs), Eigen::MatrixXd::Identity(n, n), "su2");
}

FrameAlgebra FrameAlgebra::su2_plus_r(double radius, double circle) {
  const int n = 4;
  std::vector<double> cs(n * n * n, 0.0);
  const double s = 2.0 / radius;
  auto set = [&](int k, int i, int j) {
    cs[(k * n + i) * n + j] = s;
    cs[(k * n + j) * n + i] = -s;
  };
  set(2, 0, 1);
  set(0, 1, 2);
  set(1, 2, 0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
  g(3, 3) = circle * circle;
  return FrameAlgebra(n, std::move(cs), g, "su2+r");
}

FrameAlgebra FrameAlgebra::abelian(int dim) {
  return FrameAlgebra(dim, std::vector<double>(dim * dim * dim, 0.0),
                      Eigen::MatrixXd::Identity(dim, dim), "abelian");
}

int Backend::dim() const { return is_torus() ? torus().dim() : frame().dim(); }

std::size_t Backend::num_points() const { return is_torus() ? torus().num_points() : 1; }

bool Backend::has_brackets() const {
  if (is_torus()) return false;
  for (double v : frame().structure_constants())
    if (v != 0.0) return true;
  return false;
}

double Backend::sample_volume() const { return is_torus() ? torus().cell_volume() : 1.0; }

std::string Backend::describe() const {
  std::ostringstream os;
  if (is_torus()) {
    os << (torus().local_patch() ? "patch(" : "torus(");
    for (int a = 0; a < torus().dim(); ++a) os << (a ? "x" : "") << torus().resolution()[a];
    os << ", order " << torus().stencil_order() << ")";
  } else {
    os << "frame(" << frame().label() << ", dim " << frame().dim() << ")";
  }
  return os.str();
}

BackendPtr make_torus(std::vector<int> resolution, std::vector<double> periods, int stencil_order) {
  return std::make_shared<const Backend>(
      TorusChart(std::move(resolution), std::move(periods), stencil_order));
}

BackendPtr make_patch(std::vector<double> center, int half_points, double spacing, int stencil_order) {
  return std::make_shared<const Backend>(TorusChart::patch(std::move(center), half_points, spacing, stencil_order));
}

BackendPtr make_frame(FrameAlgebra algebra) {
  return std::make_shared<const Backend>(std::move(algebra));
}

}  // namespace gkflow
