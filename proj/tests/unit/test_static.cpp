#include <cmath>

#include "doctest.h"
#include "gkflow/scenarios.hpp"
#include "gkflow/static_analysis.hpp"
#include "helpers.hpp"

using namespace gkflow;

namespace {

TensorField s3_volume(const BackendPtr& b, double kappa) {
  auto h = TensorField::form(b, 3);
  testutil::set_form_component(h, 0, {0, 1, 2}, kappa);
  return h;
}

}  // namespace

TEST_CASE("round S3 is an Einstein soliton with lambda = 2/r^2") {
  for (double r : {1.0, 2.0}) {
    auto b = make_frame(FrameAlgebra::su2(r));
    SolitonData d{Metric::reference(b), TensorField::form(b, 3), {}, 0.0};
    CHECK(fit_lambda(d) == doctest::Approx(2.0 / (r * r)));
    d.lambda = 2.0 / (r * r);
    CHECK(soliton_residual(d).max() < 1e-14);
    d.lambda = 0.0;
    CHECK(soliton_residual(d).max() == doctest::Approx(2.0 / (r * r)));
  }
}

TEST_CASE("S3 x S1 with H = 2 vol(S3) is static with lambda = 0") {
  const auto d = hopf_static_datum();
  const auto res = soliton_residual(d);
  CHECK(res.max() < 1e-14);
  CHECK(res.dh < 1e-14);
  const auto rep = staticprop_checks(d);
  CHECK(rep.passed);
  CHECK(rep.codiff_h < 1e-14);
  CHECK(rep.min_eig > -1e-14);
  CHECK(fit_lambda(d) == doctest::Approx(0.0));
  const auto sweep = lambda_sweep(d, -1.0, 1.0);
  CHECK(std::abs(sweep.lambda_min) < 1e-6);
  CHECK(sweep.samples.size() >= 41u);

  // The datum equals the closed-form one: H = 2 e^123.
  auto b = d.g.backend();
  CHECK(max_difference(d.h, s3_volume(b, 2.0)) < 1e-14);
}

TEST_CASE("negative lambda with nonzero H is rejected") {
  auto d = hopf_static_datum();
  d.lambda = -1.0;
  const auto rep = staticprop_checks(d);
  CHECK_FALSE(rep.passed);
  CHECK_FALSE(rep.failures.empty());
}

TEST_CASE("scaled soliton solve recovers both Einstein and Bismut-flat solutions") {
  auto b = make_frame(FrameAlgebra::su2_plus_r(1.0, 1.0));
  const Metric g = Metric::reference(b);
  const auto h0 = s3_volume(b, 1.0);
  const auto flat = solve_scaled_soliton(g, h0, 0.1, 1.5);
  CHECK(flat.converged);
  CHECK(flat.lambda == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(flat.kappa) == doctest::Approx(2.0));
  CHECK(cartan_normalization(g, h0) == doctest::Approx(2.0));
}

TEST_CASE("Lee form of the Hopf GK structure is parallel and dual to H") {
  const auto s = hopf_gk_state();
  const auto lee = lee_form_checks(s.g, s.j_plus, s.h);
  CHECK(lee.star_checked);
  CHECK(lee.theta_minus_star_h < 1e-14);
  CHECK(lee.d_theta < 1e-14);
  CHECK(lee.theta_norm == doctest::Approx(2.0));
  auto neg = s.h;
  neg *= -1.0;
  CHECK(lee_form_checks(s.g, s.j_plus, neg).theta_minus_star_h == doctest::Approx(4.0));
}

TEST_CASE("Hopf metric closed form and cylinder invariants") {
  const std::array<double, 4> x{0.3, -0.4, 1.2, 0.0};
  const double rho2 = 0.09 + 0.16 + 1.44;
  const auto g = hopf_metric(x);
  CHECK((g - Eigen::Matrix4d::Identity() * (2.0 / rho2)).cwiseAbs().maxCoeff() < 1e-15);
  // R x S3(sqrt 2): scal = 6/2, |Rc|^2 = 3 (2/2)^2, |Rm|^2 = 12 (1/2)^2
  const auto cyl = hopf_cylinder_invariants();
  CHECK(cyl.scal == doctest::Approx(3.0));
  CHECK(cyl.rc_norm2 == doctest::Approx(3.0));
  CHECK(cyl.rm_norm2 == doctest::Approx(3.0));
}

TEST_CASE("Hopf static point checks") {
  const auto s = hopf_static_point({0.7, 0.1, -0.4, 0.5});
  CHECK(s.static_residual < 1e-7);
  CHECK(s.surface_identity < 1e-8);
  CHECK(s.pluriclosed_rhs < 1e-7);
  CHECK(s.homogeneity < 1e-12);
  CHECK(s.scal == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(s.rm_norm2 == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("Hopf sample points are deterministic and in range") {
  const auto a = hopf_sample_points(20, 99, 0.5, 2.0);
  const auto b = hopf_sample_points(20, 99, 0.5, 2.0);
  const auto c = hopf_sample_points(20, 100, 0.5, 2.0);
  REQUIRE(a.size() == 20u);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& x : a) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    CHECK(r >= 0.5);
    CHECK(r <= 2.0);
  }
}
