#include "gkflow/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gkflow/forms.hpp"

namespace gkflow {

namespace {

void set_rotation(TensorField& j, std::size_t p, int a, int b, double s) {
  j(p, a * 4 + b) = s;
  j(p, b * 4 + a) = -s;
}

std::vector<double> periods(std::size_t n) { return std::vector<double>(n, 2.0 * std::numbers::pi); }

}  // namespace

TensorField standard_complex_structure(const BackendPtr& b) {
  if (b->dim() != 4) throw std::invalid_argument("standard_complex_structure: dimension must be 4");
  TensorField j = TensorField::endomorphism(b);
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    set_rotation(j, p, 0, 1, 1.0);
    set_rotation(j, p, 2, 3, 1.0);
  }
  return j;
}

GKState hopf_gk_state(double radius) {
  FrameAlgebra alg = FrameAlgebra::su2_plus_r(radius);
  BackendPtr left = make_frame(alg);
  BackendPtr right = make_frame(alg.opposite());
  Metric g = Metric::reference(left);
  auto make_j = [](const BackendPtr& b) {
    TensorField j = TensorField::endomorphism(b);
    set_rotation(j, 0, 3, 0, 1.0);
    set_rotation(j, 0, 1, 2, 1.0);
    return j;
  };
  TensorField jp = make_j(left);
  TensorField jm = make_j(right);
  TensorField h = d_c(kahler_form(g, jp), jp);
  return GKState{g, h, jp, jm};
}

SolitonData hopf_static_datum(double radius) {
  GKState s = hopf_gk_state(radius);
  return SolitonData{s.g, s.h, TensorField(), 0.0};
}

GKState torus_gk_state(int n, double eps, int stencil_order) {
  // The data are constant along x1 and x3; those axes only need the minimum resolution.
  const int m = stencil_order == 0 ? 4 : stencil_order + 1;
  BackendPtr b = make_torus({n, m, n, m}, periods(4), stencil_order);
  TensorField g0 = TensorField::symmetric2(b);
  TensorField jp = standard_complex_structure(b);
  TensorField jm = jp;
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    auto x = b->torus().coordinates(p);
    const double c = std::cos(x[0] + x[2]);
    g0(p, 0) = g0(p, 5) = 1.0 + eps * c;
    g0(p, 10) = g0(p, 15) = 1.0 - eps * c;
    set_rotation(jm, p, 2, 3, -1.0);
  }
  Metric g(g0);
  TensorField h = d_c(kahler_form(g, jp), jp);
  return GKState{g, h, jp, jm};
}

GKState flat_kahler_torus(std::vector<int> resolution, int stencil_order) {
  if (resolution.size() != 4) throw std::invalid_argument("flat_kahler_torus: need 4 axes");
  BackendPtr b = make_torus(resolution, periods(4), stencil_order);
  TensorField j = standard_complex_structure(b);
  return GKState{Metric::reference(b), TensorField::form(b, 3), j, j};
}

GKState perturbed_kahler_torus(std::vector<int> resolution, unsigned long long seed, double amplitude,
                               int stencil_order, int modes) {
  if (resolution.size() != 4) throw std::invalid_argument("perturbed_kahler_torus: need 4 axes");
  if (modes < 1) throw std::invalid_argument("perturbed_kahler_torus: need at least one mode");
  BackendPtr b = make_torus(resolution, periods(4), stencil_order);
  TensorField j = standard_complex_structure(b);

  struct Mode {
    std::array<int, 4> k;
    double coef;
    double phase;
  };
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wave(-1, 1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Mode> m;
  while (static_cast<int>(m.size()) < modes) {
    Mode md{{wave(rng), wave(rng), wave(rng), wave(rng)}, unit(rng), std::numbers::pi * unit(rng)};
    if (md.k == std::array<int, 4>{0, 0, 0, 0}) continue;
    m.push_back(md);
  }

  // Hessian of φ = Σ a cos(k·x + p) and g = δ + ½(Hess φ + Jᵀ Hess φ J).
  const std::size_t np = b->num_points();
  std::vector<Eigen::Matrix4d> hess(np);
  double hmax = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    auto x = b->torus().coordinates(p);
    Eigen::Matrix4d hs = Eigen::Matrix4d::Zero();
    for (const Mode& md : m) {
      double arg = md.phase;
      for (int a = 0; a < 4; ++a) arg += md.k[a] * x[a];
      Eigen::Vector4d k(md.k[0], md.k[1], md.k[2], md.k[3]);
      hs -= md.coef * std::cos(arg) * k * k.transpose();
    }
    hess[p] = hs;
    hmax = std::max(hmax, hs.cwiseAbs().maxCoeff());
  }
  const double scale = hmax > 0.0 ? amplitude / hmax : 0.0;
  Eigen::Matrix4d jm;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) jm(k, l) = j(0, k * 4 + l);
  TensorField g0 = TensorField::symmetric2(b);
  for (std::size_t p = 0; p < np; ++p) {
    // (Jᵀ H J)_{ik} = J_i^p H_pq J_k^q
    Eigen::Matrix4d hs = scale * hess[p];
    Eigen::Matrix4d gm = Eigen::Matrix4d::Identity() + 0.5 * (hs + jm * hs * jm.transpose());
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) g0(p, i * 4 + k) = gm(i, k);
  }
  return GKState{Metric(g0), TensorField::form(b, 3), j, j};
}

}  // namespace gkflow
