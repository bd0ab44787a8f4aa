#include <cmath>

#include "doctest.h"
#include "gkflow/connection.hpp"
#include "gkflow/forms.hpp"
#include "gkflow/metric.hpp"
#include "helpers.hpp"

using namespace gkflow;

namespace {

// g = e^{2f} δ with f = a cos x0 + b sin x1; derivatives in closed form.
struct Conformal {
  double a = 0.1, b = 0.05;
  double f(const std::vector<double>& x) const { return a * std::cos(x[0]) + b * std::sin(x[1]); }
  std::array<double, 4> df(const std::vector<double>& x) const {
    return {-a * std::sin(x[0]), b * std::cos(x[1]), 0.0, 0.0};
  }
  std::array<std::array<double, 4>, 4> hess(const std::vector<double>& x) const {
    std::array<std::array<double, 4>, 4> h{};
    h[0][0] = -a * std::cos(x[0]);
    h[1][1] = -b * std::sin(x[1]);
    return h;
  }
};

Metric conformal_metric(const BackendPtr& bk, const Conformal& c) {
  auto g = TensorField::symmetric2(bk);
  for (std::size_t p = 0; p < bk->num_points(); ++p) {
    const double e = std::exp(2 * c.f(bk->torus().coordinates(p)));
    for (int i = 0; i < 4; ++i) g(p, g.flat({i, i})) = e;
  }
  return Metric(g);
}

}  // namespace

TEST_CASE("Levi-Civita and Ricci of a conformally flat metric") {
  auto bk = testutil::torus({24, 24, 4, 4});
  const Conformal c;
  const Metric g = conformal_metric(bk, c);
  const auto gamma = levi_civita(g);
  const auto rc = ricci(g);
  const auto sc = scalar_curvature(g);
  const auto inv = curvature_invariants(g);
  double eg = 0, er = 0, es = 0, erm = 0;
  for (std::size_t p = 0; p < bk->num_points(); ++p) {
    const auto x = bk->torus().coordinates(p);
    const auto d = c.df(x);
    const auto h = c.hess(x);
    double lap = 0, grad2 = 0;
    for (int i = 0; i < 4; ++i) {
      lap += h[i][i];
      grad2 += d[i] * d[i];
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          const double want = (i == k) * d[j] + (j == k) * d[i] - (i == j) * d[k];
          eg = std::max(eg, std::abs(gamma(p, gamma.flat({i, j, k})) - want));
        }
    // Rc = −(n−2)(Hess f − df⊗df) − (Δf + (n−2)|df|²) δ, n = 4
    double rc2 = 0;
    const double e = std::exp(2 * c.f(x));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double want = -2 * (h[i][j] - d[i] * d[j]) - (i == j) * (lap + 2 * grad2);
        er = std::max(er, std::abs(rc(p, rc.flat({i, j})) - want));
        rc2 += want * want / (e * e);
      }
    const double scal = (-6 * lap - 6 * grad2) / e;
    es = std::max(es, std::abs(sc(p, 0) - scal));
    // Weyl = 0 in 4D: |Rm|² = 2|Rc|² − scal²/3
    erm = std::max(erm, std::abs(inv.rm_norm2(p, 0) - (2 * rc2 - scal * scal / 3)));
  }
  CHECK(eg < 1e-12);
  CHECK(er < 1e-11);
  CHECK(es < 1e-11);
  CHECK(erm < 1e-11);
}

TEST_CASE("bi-invariant group: Koszul connection is half the bracket") {
  auto bk = make_frame(FrameAlgebra::su2_plus_r(1.0, 1.0));
  const Metric g = Metric::reference(bk);
  const auto gamma = levi_civita(g);
  double err = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        err = std::max(err, std::abs(gamma(0, gamma.flat({i, j, k})) - 0.5 * bk->structure_constant(k, i, j)));
  CHECK(err < 1e-15);
  CHECK(torsion(gamma).max_abs() < 1e-15);
}

TEST_CASE("round three-sphere factor: Rc = 2g/r^2 on S3, zero on the circle") {
  for (double r : {1.0, 2.0}) {
    auto bk = make_frame(FrameAlgebra::su2_plus_r(r, 1.0));
    const Metric g = Metric::reference(bk);
    const auto rc = ricci(g);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double want = (i == j && i < 3) ? 2.0 / (r * r) : 0.0;
        CHECK(rc(0, rc.flat({i, j})) == doctest::Approx(want).epsilon(1e-14));
      }
    CHECK(scalar_curvature(g)(0, 0) == doctest::Approx(6.0 / (r * r)));
  }
}

TEST_CASE("H squared of the S3 volume form is 2 kappa^2 on S3 directions") {
  auto bk = make_frame(FrameAlgebra::su2_plus_r(1.0, 1.0));
  const Metric g = Metric::reference(bk);
  const double kappa = 1.5;
  auto h = TensorField::form(bk, 3);
  testutil::set_form_component(h, 0, {0, 1, 2}, kappa);
  const auto h2 = h_squared(g, h);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double want = (i == j && i < 3) ? 2 * kappa * kappa : 0.0;
      CHECK(h2(0, h2.flat({i, j})) == doctest::Approx(want));
    }
}

TEST_CASE("flat torus as coordinates and as abelian group agree") {
  auto t = testutil::torus({4, 4, 4, 4});
  auto f = make_frame(FrameAlgebra::abelian(4));
  CHECK(riemann(Metric::reference(t)).max_abs() == 0.0);
  CHECK(riemann(Metric::reference(f)).max_abs() == 0.0);
}

TEST_CASE("Lie derivative of a function is the directional derivative") {
  auto bk = testutil::torus({16, 16, 4, 4});
  auto f = testutil::scalar(bk, [](const auto& x) { return std::sin(x[0]) * std::cos(x[1]); });
  auto xv = TensorField::vector(bk);
  for (std::size_t p = 0; p < bk->num_points(); ++p) {
    xv(p, 0) = 2.0;
    xv(p, 1) = std::sin(bk->torus().coordinates(p)[0]);
  }
  auto lf = lie_derivative(xv, f);
  double err = 0;
  for (std::size_t p = 0; p < bk->num_points(); ++p) {
    const auto x = bk->torus().coordinates(p);
    const double want = 2 * std::cos(x[0]) * std::cos(x[1]) - std::sin(x[0]) * std::sin(x[0]) * std::sin(x[1]);
    err = std::max(err, std::abs(lf(p, 0) - want));
  }
  CHECK(err < 1e-12);
}
