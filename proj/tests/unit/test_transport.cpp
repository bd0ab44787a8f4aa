#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gkflow/gauge_transport.hpp"
#include "gkflow/scenarios.hpp"
#include "gkflow/snapshot.hpp"
#include "helpers.hpp"

using namespace gkflow;

namespace {

// Constant field c ∂_0 sampled at `times`.
SampledVectorField translation(const BackendPtr& b, const std::vector<double>& times, double c) {
  auto x = TensorField::vector(b);
  for (std::size_t p = 0; p < b->num_points(); ++p) x(p, 0) = c;
  return SampledVectorField(times, std::vector<TensorField>(times.size(), x));
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("gkflow_unit_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("translation flow pulls back a band-limited function exactly") {
  auto b = testutil::torus({16, 5, 5, 5});
  const std::vector<double> times{0.0, 0.25, 0.5};
  const auto x = translation(b, times, 1.0);
  const auto phi = integrate_diffeo(x, b, times);
  auto f = testutil::scalar(b, [](const auto& y) { return std::sin(y[0]) + 0.3 * std::cos(2 * y[0]); });
  const auto pulled = pullback(phi, 2, f);
  double err = 0;
  for (std::size_t p = 0; p < b->num_points(); ++p) {
    const double y = b->torus().coordinates(p)[0] + 0.5;
    err = std::max(err, std::abs(pulled(p, 0) - (std::sin(y) + 0.3 * std::cos(2 * y))));
  }
  CHECK(err < 1e-13);
  CHECK(phi.min_jacobian_determinant() == doctest::Approx(1.0));
  CHECK(pullback(phi, 0, f).values()[3] == doctest::Approx(f.values()[3]));
}

TEST_CASE("pullback of a covector by a translation is a translation of its components") {
  auto b = testutil::torus({16, 5, 5, 5});
  const std::vector<double> times{0.0, 0.5};
  const auto phi = integrate_diffeo(translation(b, times, 2.0), b, times);
  auto a = TensorField::form(b, 1);
  for (std::size_t p = 0; p < b->num_points(); ++p) a(p, 1) = std::cos(b->torus().coordinates(p)[0]);
  const auto pa = pullback(phi, 1, a);
  double err = 0;
  for (std::size_t p = 0; p < b->num_points(); ++p)
    err = std::max(err, std::abs(pa(p, 1) - std::cos(b->torus().coordinates(p)[0] + 1.0)));
  CHECK(err < 1e-13);
}

TEST_CASE("field snapshots round trip bit for bit") {
  SUBCASE("torus") {
    const auto s = torus_gk_state(6, 0.2, 4);
    std::stringstream ss;
    write_field(ss, s.h, "h");
    std::string name;
    const auto back = read_field(ss, &name);
    CHECK(name == "h");
    CHECK(back.slots() == s.h.slots());
    CHECK(back.symmetry() == s.h.symmetry());
    CHECK(max_difference(back.rebind(s.h.backend()), s.h) == 0.0);
    CHECK(back.backend()->torus().stencil_order() == 4);
  }
  SUBCASE("frame") {
    const auto s = hopf_gk_state();
    std::stringstream ss;
    write_field(ss, s.j_minus, "j_minus");
    const auto back = read_field(ss);
    CHECK(back.backend()->frame().structure_constants() == s.j_minus.backend()->frame().structure_constants());
    CHECK(max_difference(back.rebind(s.j_minus.backend()), s.j_minus) == 0.0);
  }
}

TEST_CASE("state directories round trip and share backends") {
  const auto dir = temp_dir("state");
  const auto s = torus_gk_state(6, 0.2, 4);
  save_state(dir, s, 0.125, {{"note", "x"}});
  double t = 0;
  const auto back = load_state(dir, &t);
  CHECK(t == 0.125);
  CHECK(back.g.backend() == back.h.backend());
  CHECK(max_difference(back.g.tensor().rebind(s.g.backend()), s.g.tensor()) == 0.0);
  CHECK(max_difference(back.j_minus.rebind(s.j_minus.backend()), s.j_minus) == 0.0);
  const auto m = read_manifest(dir);
  CHECK(m.at("format") == "gkflow-state 1");
  CHECK(m.at("note") == "x");
  std::filesystem::remove_all(dir);
}

TEST_CASE("diffeomorphism snapshots round trip") {
  auto b = testutil::torus({8, 5, 5, 5});
  const std::vector<double> times{0.0, 0.1, 0.2};
  const auto phi = integrate_diffeo(translation(b, times, 1.0), b, times);
  std::stringstream ss;
  write_diffeo(ss, phi);
  const auto back = read_diffeo(ss);
  REQUIRE(back.num_times() == 3u);
  CHECK(back.times() == phi.times());
  CHECK(back.active_axes() == phi.active_axes());
  for (std::size_t p = 0; p < b->num_points(); p += 7) {
    const auto a = phi.position(2, p), c = back.position(2, p);
    CHECK(std::equal(a.begin(), a.end(), c.begin()));
  }
}

TEST_CASE("malformed snapshots are rejected") {
  std::stringstream bad("gkflow-field 1\nname g\nbackend torus\ndim 4\nresolution 4 4\n");
  CHECK_THROWS_AS(read_field(bad), SnapshotError);
  std::stringstream wrong("not-a-field\n");
  CHECK_THROWS_AS(read_field(wrong), SnapshotError);
  CHECK_THROWS_AS(load_state(temp_dir("missing")), SnapshotError);
}
