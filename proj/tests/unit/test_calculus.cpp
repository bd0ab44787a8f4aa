#include <cmath>

#include "doctest.h"
#include "gkflow/forms.hpp"
#include "gkflow/metric.hpp"
#include "helpers.hpp"

using namespace gkflow;
using testutil::kTwoPi;

TEST_CASE("spectral derivative is exact on band-limited data") {
  auto b = testutil::torus({16, 5, 5, 5});
  auto f = testutil::scalar(b, [](const auto& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]); });
  auto df = exterior_derivative(f);
  double err = 0;
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    const auto x = b->torus().coordinates(p);
    err = std::max(err, std::abs(df(p, 0) - 3 * std::cos(3 * x[0]) * std::cos(2 * x[1])));
    err = std::max(err, std::abs(df(p, 1) + 2 * std::sin(3 * x[0]) * std::sin(2 * x[1])));
    err = std::max(err, std::abs(df(p, 2)) + std::abs(df(p, 3)));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("finite-difference derivatives act on Fourier modes by their symbols") {
  // The centred stencils are diagonal on e^{ikx}; compare against the symbols.
  const int n = 16;
  const double h = kTwoPi / n;
  for (int order : {2, 4, 6}) {
    auto b = testutil::torus({n, order + 1, order + 1, order + 1}, order);
    for (int k : {1, 3, 5}) {
      auto f = testutil::scalar(b, [k](const auto& x) { return std::sin(k * x[0]); });
      auto df = exterior_derivative(f);
      const double t = k * h;
      double symbol = 0;
      if (order == 2) symbol = std::sin(t) / h;
      if (order == 4) symbol = (8 * std::sin(t) - std::sin(2 * t)) / (6 * h);
      if (order == 6) symbol = (45 * std::sin(t) - 9 * std::sin(2 * t) + std::sin(3 * t)) / (30 * h);
      double err = 0;
      for (std::size_t p = 0; p < b->num_points(); ++p)
        err = std::max(err, std::abs(df(p, 0) - symbol * std::cos(k * b->torus().coordinates(p)[0])));
      CAPTURE(order);
      CAPTURE(k);
      CHECK(err < 1e-12);
    }
  }
}

TEST_CASE("wedge and Hodge star on the flat torus") {
  auto b = testutil::torus({4, 4, 4, 4});
  auto dx0 = TensorField::form(b, 1), dx1 = TensorField::form(b, 1);
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    dx0(p, 0) = 1;
    dx1(p, 1) = 1;
  }
  auto w = wedge(dx0, dx1);
  CHECK(w(0, w.flat({0, 1})) == doctest::Approx(1.0));
  CHECK(w(0, w.flat({1, 0})) == doctest::Approx(-1.0));
  const Metric g = Metric::reference(b);
  auto s = hodge_star(g, w);
  CHECK(s(0, s.flat({2, 3})) == doctest::Approx(1.0));
  CHECK(s(0, s.flat({0, 1})) == doctest::Approx(0.0));
  CHECK(max_difference(hodge_star(g, s), w) < 1e-14);

  // ⋆1 = vol
  auto one = TensorField::scalar(b);
  one.fill(1.0);
  auto vol = hodge_star(g, one);
  CHECK(vol(0, vol.flat({0, 1, 2, 3})) == doctest::Approx(1.0));
}

TEST_CASE("volume and L2 pairing use sqrt(det g)") {
  auto b = testutil::torus({4, 4, 4, 4});
  auto gt = TensorField::symmetric2(b);
  for (std::size_t p = 0; p < b->num_points(); ++p)
    for (int i = 0; i < 4; ++i) gt(p, gt.flat({i, i})) = 4.0;
  const Metric g(gt);
  auto one = TensorField::scalar(b);
  one.fill(1.0);
  const double v = std::pow(kTwoPi, 4);
  CHECK(integrate(g, one) == doctest::Approx(16 * v));
  // |dx0|^2_g = 1/4
  auto dx0 = TensorField::form(b, 1);
  for (std::size_t p = 0; p < b->num_points(); ++p) dx0(p, 0) = 1;
  CHECK(l2_inner(g, dx0, dx0) == doctest::Approx(4 * v));
  auto zero = TensorField::form(b, 1);
  CHECK(l2_inner(g, zero, dx0) == 0.0);
}

TEST_CASE("Laplace-Beltrami has the analyst's sign") {
  auto b = testutil::torus({8, 8, 4, 4});
  const Metric g = Metric::reference(b);
  auto f = testutil::scalar(b, [](const auto& x) { return std::sin(x[0]) + std::cos(2 * x[1]); });
  auto lf = laplace_beltrami(g, f);
  double err = 0;
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    const auto x = b->torus().coordinates(p);
    err = std::max(err, std::abs(lf(p, 0) + std::sin(x[0]) + 4 * std::cos(2 * x[1])));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("d of a 1-form on a Lie group uses the structure constants") {
  // dθ(e_i, e_j) = −θ([e_i, e_j]) for an invariant 1-form θ.
  auto b = make_frame(FrameAlgebra::su2(1.0));
  auto th = TensorField::form(b, 1);
  th(0, 2) = 1.0;  // e^3
  auto d = exterior_derivative(th);
  // [e_1, e_2] = 2 e_3
  CHECK(d(0, d.flat({0, 1})) == doctest::Approx(-2.0));
  CHECK(d(0, d.flat({1, 2})) == doctest::Approx(0.0));
  CHECK(exterior_derivative(d).max_abs() < 1e-14);
}

TEST_CASE("frame algebra invariants") {
  const auto su2 = FrameAlgebra::su2(1.0);
  CHECK(su2.jacobi_residual() < 1e-14);
  CHECK(su2.unimodular());
  CHECK(su2.c(2, 0, 1) == doctest::Approx(2.0));
  CHECK(su2.opposite().c(2, 0, 1) == doctest::Approx(-2.0));
  CHECK(FrameAlgebra::su2(2.0).c(2, 0, 1) == doctest::Approx(1.0));
  CHECK(FrameAlgebra::abelian(4).jacobi_residual() == 0.0);
  auto p = make_patch({1.0, 2.0, 3.0, 4.0}, 2, 0.1);
  const auto c = p->torus().coordinates(p->num_points() / 2);
  for (int i = 0; i < 4; ++i) CHECK(c[i] == doctest::Approx(1.0 + i));
}

TEST_CASE("tensor storage, symmetry and shape checks") {
  auto b = testutil::torus({4, 4, 4, 4});
  auto w = TensorField::form(b, 2);
  w(0, w.flat({0, 1})) = 1.0;
  w.enforce_symmetry();
  CHECK(w(0, w.flat({0, 1})) == doctest::Approx(0.5));
  CHECK(w(0, w.flat({1, 0})) == doctest::Approx(-0.5));
  CHECK(w.symmetry_defect() == 0.0);

  std::vector<int> idx(3);
  auto t = TensorField(b, {Index::Lower, Index::Upper, Index::Lower});
  for (std::size_t c = 0; c < t.components(); ++c) {
    t.unflatten(c, idx);
    CHECK(t.flat(std::span<const int>(idx)) == c);
  }
  auto v = TensorField::vector(b);
  CHECK_THROWS_AS(v += TensorField::form(b, 1), std::invalid_argument);
  CHECK_THROWS_AS(v.rebind(testutil::torus({4, 4, 4, 5})), std::invalid_argument);
}

TEST_CASE("metric construction rejects non-positive tensors") {
  auto b = testutil::torus({4, 4, 4, 4});
  auto gt = TensorField::symmetric2(b);
  for (std::size_t p = 0; p < b->num_points(); ++p)
    for (int i = 0; i < 4; ++i) gt(p, gt.flat({i, i})) = 1.0;
  gt(5, gt.flat({2, 2})) = -0.5;
  CHECK_THROWS_AS(Metric{gt}, DegenerateMetricError);
}
