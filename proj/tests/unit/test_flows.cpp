#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "gkflow/connection.hpp"
#include "gkflow/flows.hpp"
#include "gkflow/forms.hpp"
#include "gkflow/integrator.hpp"
#include "gkflow/scenarios.hpp"
#include "gkflow/verification.hpp"
#include "helpers.hpp"

using namespace gkflow;

namespace {

// S3 x S1 with H = kappa e^123.
TensorField s3_volume(const BackendPtr& b, double kappa) {
  auto h = TensorField::form(b, 3);
  testutil::set_form_component(h, 0, {0, 1, 2}, kappa);
  return h;
}

}  // namespace

TEST_CASE("B-field flow on S3 x S1: static exactly when kappa = 2") {
  auto b = make_frame(FrameAlgebra::su2_plus_r(1.0, 1.0));
  const Metric g = Metric::reference(b);
  // ∂g = −2Rc + ½H² = (−4 + κ²) g on S3 directions
  for (double kappa : {1.0, 2.0, 3.0}) {
    const auto d = bfield_rhs(g, s3_volume(b, kappa));
    for (int i = 0; i < 4; ++i)
      CHECK(d.dg(0, d.dg.flat({i, i})) == doctest::Approx(i < 3 ? kappa * kappa - 4 : 0.0).epsilon(1e-14));
    CHECK(d.dh.max_abs() < 1e-14);
  }
}

TEST_CASE("B-field right-hand side vanishes on the flat torus") {
  const auto s = flat_kahler_torus({5, 5, 5, 5});
  const auto d = bfield_rhs(s.g, s.h);
  CHECK(d.dg.max_abs() == 0.0);
  CHECK(d.dh.max_abs() == 0.0);
  CHECK(j_rhs(s.g, s.j_plus).max_abs() == 0.0);
}

TEST_CASE("B-field sign symmetry is exact") {
  const auto s = torus_gk_state(8, 0.2);
  CHECK(bfield_sign_symmetry(s.g, s.h) <= 1e-15);
}

TEST_CASE("J-flow vanishes on the bi-invariant Hopf structure") {
  const auto s = hopf_gk_state();
  CHECK(j_rhs(s.g, s.j_plus).max_abs() < 1e-14);
  const auto d = gk_coupled_rhs(s);
  CHECK(d.dg.max_abs() < 1e-14);
  CHECK(d.dh.max_abs() < 1e-14);
}

TEST_CASE("Ricci flow of the round S3 factor shrinks linearly") {
  // H = 0: ∂g = −2Rc = −4 g0 on S3 directions (Rc is scale invariant), so
  // g(t) = (1 − 4t) g0 there; RK4 reproduces the linear solution.
  auto s = hopf_gk_state();
  s.h.fill(0.0);
  FlowProblem p;
  p.system = FlowSystem::BField;
  p.initial = s;
  p.dt = 0.01;
  p.steps = 10;
  const auto tr = integrate(p);
  REQUIRE(tr.ok());
  const auto& g = tr.final_state.g.tensor();
  CHECK(g(0, g.flat({0, 0})) == doctest::Approx(1.0 - 4 * 0.1).epsilon(1e-13));
  CHECK(g(0, g.flat({3, 3})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tr.final_time == doctest::Approx(0.1));
  CHECK(tr.records.size() == 11u);

  SUBCASE("past the extinction time the run stops as degenerate") {
    p.dt = 0.06;
    p.steps = 10;
    const auto bad = integrate(p);
    CHECK(bad.status == FlowStatus::Degenerate);
    CHECK(bad.failed_step == 5);
  }
}

TEST_CASE("stability bound scales with the metric") {
  auto b = testutil::torus({16, 16, 16, 16}, 4);
  const Metric g = Metric::reference(b);
  auto g4 = g.tensor();
  g4 *= 4.0;
  const double c1 = cfl_bound(g, 1.0);
  CHECK(c1 > 0.0);
  CHECK(cfl_bound(Metric(g4), 1.0) == doctest::Approx(4 * c1));
  CHECK(cfl_bound(g, 0.5) == doctest::Approx(0.5 * c1));
  const auto frame = make_frame(FrameAlgebra::su2(1.0));
  CHECK(cfl_bound(Metric::reference(frame), 1.0) == std::numeric_limits<double>::infinity());
  CHECK(default_cfl_safety(Scheme::RK4) == 1.0);
  CHECK(default_cfl_safety(Scheme::Euler) == 0.5);
}

TEST_CASE("flow enum strings round trip") {
  for (auto s : {FlowSystem::BField, FlowSystem::Pluriclosed, FlowSystem::GKCoupled, FlowSystem::GaugeFixed})
    CHECK(flow_system_from_string(to_string(s)) == s);
  for (auto s : {Scheme::RK4, Scheme::Euler}) CHECK(scheme_from_string(to_string(s)) == s);
  CHECK_THROWS(flow_system_from_string("ricci"));
}

TEST_CASE("trajectory CSV has the documented columns and 17-digit values") {
  auto s = hopf_gk_state();
  FlowProblem p;
  p.initial = s;
  p.steps = 2;
  p.dt = 1.0 / 3.0;
  const auto tr = integrate(p);
  std::ostringstream os;
  write_trajectory_csv(tr, os);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  CHECK(header ==
        "t,rc_norm,h_norm,dh_norm,nij_plus,nij_minus,r1,r2,r3,compat_plus,compat_minus,min_eig_g,x_plus_norm,"
        "x_minus_norm");
  std::getline(is, row);
  std::getline(is, row);
  CHECK(row.rfind("0.33333333333333331,", 0) == 0);
}

TEST_CASE("pluriclosed right-hand side on a Kahler surface converges to minus the Ricci form") {
  // Kahler: the metric part of the pluriclosed flow is −Rc. The discrete
  // mismatch decays spectrally with the resolution.
  std::vector<double> err;
  for (int n : {8, 12}) {
    const auto s = perturbed_kahler_torus({n, n, n, n}, 5, 0.05);
    const auto dg = metric_rate_from_form_rate(pluriclosed_rhs(s.g, s.j_plus), s.j_plus);
    auto rc = ricci(s.g);
    rc += dg;
    err.push_back(rc.max_abs());
  }
  CHECK(err[1] < 1e-7);
  CHECK(err[1] < 1e-2 * err[0]);
}
