#include "gkflow/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace gkflow {

namespace {
std::string degenerate_message(std::size_t point, double eig) {
  std::ostringstream os;
  os << "metric not positive definite at point " << point << " (smallest eigenvalue " << eig << ")";
  return os.str();
}
}  // namespace

DegenerateMetricError::DegenerateMetricError(std::size_t point, double eigenvalue)
    : std::runtime_error(degenerate_message(point, eigenvalue)), point_(point), eigenvalue_(eigenvalue) {}

Metric::Metric(TensorField g) : g_(std::move(g)) {
  if (g_.rank() != 2 || g_.slots()[0] != Index::Lower || g_.slots()[1] != Index::Lower) {
    throw std::invalid_argument("metric: expected a covariant 2-tensor");
  }
  g_.set_symmetry(Symmetry::Symmetric);
  g_.enforce_symmetry();
  const int n = g_.dim();
  inv_ = TensorField(g_.backend(), {Index::Upper, Index::Upper}, Symmetry::Symmetric);
  sqrt_det_ = TensorField::scalar(g_.backend());
  min_eig_ = std::numeric_limits<double>::infinity();
  max_inv_eig_ = 0.0;
  Eigen::MatrixXd m(n, n);
  for (std::size_t p = 0; p < g_.num_points(); ++p) {
    auto v = g_.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
    if (!m.allFinite()) throw DegenerateMetricError(p, std::numeric_limits<double>::quiet_NaN());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo > 0.0)) throw DegenerateMetricError(p, lo);
    min_eig_ = std::min(min_eig_, lo);
    max_inv_eig_ = std::max(max_inv_eig_, 1.0 / lo);
    Eigen::MatrixXd inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
    auto w = inv_.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w[i * n + j] = 0.5 * (inv(i, j) + inv(j, i));
    sqrt_det_(p, 0) = std::sqrt(es.eigenvalues().prod());
  }
}

Metric Metric::reference(const BackendPtr& backend) {
  TensorField g = TensorField::symmetric2(backend);
  const int n = backend->dim();
  for (std::size_t p = 0; p < g.num_points(); ++p) {
    auto v = g.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        v[i * n + j] = backend->is_torus() ? (i == j ? 1.0 : 0.0) : backend->frame().frame_metric()(i, j);
  }
  return Metric(std::move(g));
}

double Metric::inverse_defect() const {
  const int n = dim();
  double worst = 0.0;
  for (std::size_t p = 0; p < num_points(); ++p) {
    auto a = g_.at(p);
    auto b = inv_.at(p);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a[i * n + j] * b[j * n + k];
        worst = std::max(worst, std::abs(s - (i == k ? 1.0 : 0.0)));
      }
  }
  return worst;
}

TensorField lower_vector(const Metric& g, const TensorField& x) {
  const int n = g.dim();
  TensorField out = TensorField::form(g.backend(), 1);
  for (std::size_t p = 0; p < out.num_points(); ++p) {
    auto gv = g.tensor().at(p);
    auto xv = x.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += gv[i * n + j] * xv[j];
      o[i] = s;
    }
  }
  return out;
}

TensorField raise_one_form(const Metric& g, const TensorField& a) {
  const int n = g.dim();
  TensorField out = TensorField::vector(g.backend());
  for (std::size_t p = 0; p < out.num_points(); ++p) {
    auto gv = g.inverse().at(p);
    auto av = a.at(p);
    auto o = out.at(p);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += gv[i * n + j] * av[j];
      o[i] = s;
    }
  }
  return out;
}

}  // namespace gkflow
