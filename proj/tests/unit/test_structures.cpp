#include <cmath>
#include <random>

#include "doctest.h"
#include "gkflow/complex_structure.hpp"
#include "gkflow/forms.hpp"
#include "gkflow/scenarios.hpp"
#include "gkflow/verification.hpp"
#include "helpers.hpp"

using namespace gkflow;

namespace {

// Complex structure on T^4: J0 conjugated by a
// position-dependent shear A = Id + s sin(x1) E_{02}.
TensorField sheared_j(const BackendPtr& b, double s) {
  auto j = TensorField::endomorphism(b);
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    const double a = s * std::sin(b->torus().coordinates(p)[1]);
    Eigen::Matrix4d j0 = Eigen::Matrix4d::Zero();
    j0(0, 1) = 1;
    j0(1, 0) = -1;
    j0(2, 3) = 1;
    j0(3, 2) = -1;
    Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
    A(0, 2) = a;
    const Eigen::Matrix4d m = A.inverse() * j0 * A;
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) j(p, j.flat({k, l})) = m(k, l);
  }
  return j;
}

}  // namespace

TEST_CASE("standard complex structure: Kahler form, Nijenhuis, compatibility") {
  auto b = testutil::torus({4, 4, 4, 4});
  const auto j = standard_complex_structure(b);
  const Metric g = Metric::reference(b);
  CHECK(j_squared_defect(j) == 0.0);
  CHECK(compatibility_defect(g, j) == 0.0);
  CHECK(nijenhuis(j).max_abs() == 0.0);
  const auto w = kahler_form(g, j);
  // ω_{01} = g(J e0, e1) = g(e1, e1)
  CHECK(w(0, w.flat({0, 1})) == doctest::Approx(1.0));
  CHECK(w(0, w.flat({2, 3})) == doctest::Approx(1.0));
  CHECK(max_difference(metric_from_kahler_form(w, j), g.tensor()) < 1e-15);
  CHECK(exterior_derivative(w).max_abs() == 0.0);
}

TEST_CASE("Kahler form rejects an incompatible metric") {
  auto b = testutil::torus({4, 4, 4, 4});
  auto gt = Metric::reference(b).tensor();
  for (std::size_t p = 0; p < b->num_points(); ++p) gt(p, gt.flat({0, 0})) = 2.0;
  CHECK_THROWS_AS(kahler_form(Metric(gt), standard_complex_structure(b)), IncompatibleStructureError);
}

TEST_CASE("Nijenhuis tensor of a generic structure: coordinate and bracket forms agree and are nonzero") {
  auto b = testutil::torus({12, 12, 5, 5});
  std::mt19937_64 rng(3);
  const auto j = random_complex_structure(b, rng, 0.1);
  const auto n1 = nijenhuis(j);
  const auto n2 = nijenhuis_bracket(j);
  CHECK(n1.max_abs() > 0.1);
  CHECK(max_difference(n1, n2) < 1e-12 * n1.max_abs());
}

TEST_CASE("d^c agrees with -dα(J,J,J) computed slot by slot") {
  auto b = testutil::torus({12, 12, 5, 5});
  std::mt19937_64 rng(7);
  const auto a = random_smooth_field(b, {Index::Lower, Index::Lower}, Symmetry::Antisymmetric, rng, 0.3);
  const auto j = sheared_j(b, 0.2);
  const auto da = exterior_derivative(a);
  const auto dc = d_c(a, j);
  double err = 0;
  for (std::size_t p = 0; p < b->num_points(); ++p)
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        for (int z = 0; z < 4; ++z) {
          double want = 0;
          for (int u = 0; u < 4; ++u)
            for (int v = 0; v < 4; ++v)
              for (int w = 0; w < 4; ++w)
                want -= j(p, j.flat({x, u})) * j(p, j.flat({y, v})) * j(p, j.flat({z, w})) *
                        da(p, da.flat({u, v, w}));
          err = std::max(err, std::abs(dc(p, dc.flat({x, y, z})) - want));
        }
  CHECK(err < 1e-13);
}

TEST_CASE("projection to J^2 = -1") {
  auto b = testutil::torus({4, 4, 4, 4});
  SUBCASE("an exact structure is a fixed point") {
    auto j = standard_complex_structure(b);
    const auto before = j;
    CHECK(project_complex_structure(j) == 0.0);
    CHECK(max_difference(j, before) == 0.0);
  }
  SUBCASE("a perturbed structure is restored and stays close") {
    std::mt19937_64 rng(3);
    auto j = random_complex_structure(b, rng, 0.2);
    auto noise = random_smooth_field(b, {Index::Lower, Index::Upper}, Symmetry::None, rng, 1e-3);
    const auto exact = j;
    j += noise;
    CHECK(j_squared_defect(j) > 1e-4);
    const double change = project_complex_structure(j);
    CHECK(j_squared_defect(j) < 1e-13);
    CHECK(change < 1e-2);
    CHECK(max_difference(j, exact) < 5e-3);
  }
  SUBCASE("repeated eigenvalues do not break the iteration") {
    auto j = standard_complex_structure(b);
    j *= 1.01;
    project_complex_structure(j);
    CHECK(max_difference(j, standard_complex_structure(b)) < 1e-14);
  }
}

TEST_CASE("GK recipes satisfy the GK equations") {
  CHECK(gk_residuals(hopf_gk_state()).max() < 1e-14);
  CHECK(gk_residuals(flat_kahler_torus({5, 5, 5, 5})).max() == 0.0);
  CHECK(gk_residuals(torus_gk_state(8, 0.2)).max() < 1e-12);
  const auto k = perturbed_kahler_torus({6, 6, 6, 6}, 11, 0.05);
  CHECK(gk_residuals(k).max() < 1e-12);
  CHECK(k.h.max_abs() == 0.0);
}

TEST_CASE("GK torus: H is d^c_plus omega_plus and J_minus is a different structure") {
  const auto s = torus_gk_state(8, 0.2);
  CHECK(s.h.max_abs() > 0.1);
  CHECK(max_difference(s.j_plus, s.j_minus) > 1.0);
  CHECK(exterior_derivative(s.h).max_abs() < 1e-12);
}

TEST_CASE("Hopf GK state: J_minus lives on the opposite algebra") {
  const auto s = hopf_gk_state();
  REQUIRE(s.j_minus.backend()->is_frame());
  CHECK(s.j_minus.backend()->frame().c(2, 0, 1) == doctest::Approx(-s.g.backend()->frame().c(2, 0, 1)));
  CHECK(ad_invariance_defect(s.h) < 1e-14);
  CHECK(ad_invariance_defect(s.g.tensor()) < 1e-14);
}
