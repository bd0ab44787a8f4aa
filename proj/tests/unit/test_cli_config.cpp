#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catalog.hpp"
#include "config.hpp"
#include "doctest.h"
#include "runner.hpp"

using namespace gkcli;

namespace {

const char* kMinimal = "name = demo\nrecipe = HOPF_GK\n";

}  // namespace

TEST_CASE("config parsing: defaults and comments") {
  const auto s = parse_scenario(std::string(kMinimal) + "# comment\n\nchecks = static, bfield_sign  # trailing\n", "t");
  CHECK(s.name == "demo");
  CHECK(s.recipe == "HOPF_GK");
  CHECK(s.resolution == std::vector<int>{8, 8, 8, 8});
  CHECK(s.checks == std::vector<std::string>{"static", "bfield_sign"});
  CHECK_FALSE(s.has_flow);
  CHECK_FALSE(s.expect_fail);
  CHECK(s.tolerance("soliton_residual") == 1e-10);
}

TEST_CASE("config parsing: flow keys and tolerance overrides") {
  const auto s = parse_scenario(std::string(kMinimal) +
                                    "system = bfield\nscheme = euler\ndt = 0.5e-2\nsteps = 7\nresolution = 8 4 8 4\n"
                                    "checks = gk_residuals\ntol.gk_residual_max = 3e-5\nexpect = fail\n",
                                "t");
  CHECK(s.has_flow);
  CHECK(s.system == gkflow::FlowSystem::BField);
  CHECK(s.scheme == gkflow::Scheme::Euler);
  CHECK(s.dt == 0.005);
  CHECK(s.steps == 7);
  CHECK(s.resolution == std::vector<int>{8, 4, 8, 4});
  CHECK(s.tolerance("gk_residual_max") == 3e-5);
  CHECK(s.expect_fail);
}

TEST_CASE("config parsing: errors") {
  const std::string base = kMinimal;
  CHECK_THROWS_AS(parse_scenario(base + "colour = red\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "dt = 0.1\ndt = 0.2\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "dt = fast\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "dt = -1\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "steps = 2.5\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "checks = everything\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "tol.nonsense = 1\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "no equals sign\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "expect = maybe\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "stencil_order = 3\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(base + "checks = gk_residuals\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("recipe = HOPF_GK\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("name = a/b\nrecipe = HOPF_GK\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("name = x\nrecipe = SPHERE\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("name = x\nrecipe = CUSTOM\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("name = x\nrecipe = HOPF_STATIC\nsystem = gk\nsteps = 3\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("name = x\nrecipe = HOPF_STATIC\nchecks = static\n", "t"), ConfigError);
}

TEST_CASE("config errors carry the line number") {
  try {
    parse_scenario("name = x\nrecipe = HOPF_GK\nbogus = 1\n", "file.cfg");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("file.cfg:3") != std::string::npos);
  }
}

TEST_CASE("verdict and exit codes") {
  RunOutcome ok;
  ok.rows.push_back(gkflow::make_check("a", 1.0, 2.0));
  RunOutcome bad = ok;
  bad.rows.push_back(gkflow::make_check("b", 3.0, 2.0));
  RunOutcome nan = ok;
  nan.rows.push_back(gkflow::make_check("c", std::nan(""), 2.0));

  auto v = ok;
  finalize(v, false);
  CHECK(v.verdict == "PASS");
  CHECK(v.exit_code == 0);
  v = bad;
  finalize(v, false);
  CHECK(v.verdict == "FAIL");
  CHECK(v.exit_code == 1);
  v = nan;
  finalize(v, false);
  CHECK(v.exit_code == 1);
  v = bad;
  finalize(v, true);
  CHECK(v.verdict == "EXPECTED_FAIL");
  CHECK(v.exit_code == 0);
  v = ok;
  finalize(v, true);
  CHECK(v.verdict == "UNEXPECTED_PASS");
  CHECK(v.exit_code != 0);
  v = bad;
  v.status = "DEGENERATE";
  finalize(v, true);
  CHECK(v.verdict == "DEGENERATE");
  CHECK(v.exit_code == kExitDegenerate);
}

TEST_CASE("describe knows every recipe, check and row, and rejects unknown names") {
  std::ostringstream list;
  print_list(list);
  for (const auto& r : recipe_specs()) {
    CHECK(list.str().find(r.name) != std::string::npos);
    std::ostringstream os;
    CHECK(print_explain(os, r.name));
  }
  for (const auto& c : check_specs()) {
    std::ostringstream os;
    CHECK(print_explain(os, c.name));
    for (const auto& row : c.rows) CHECK(print_explain(os, row.first));
  }
  std::ostringstream os;
  CHECK_FALSE(print_explain(os, "NO_SUCH_THING"));
}

TEST_CASE("bundled scenarios parse") {
  const auto files = bundled_scenarios();
  CHECK(files.size() >= 10u);
  for (const auto& f : files) {
    CAPTURE(f.string());
    CHECK_NOTHROW(load_scenario(f));
  }
}

TEST_CASE("a small scenario runs and writes deterministic artifacts") {
  const auto root = std::filesystem::temp_directory_path() / "gkflow_unit_runner";
  std::filesystem::remove_all(root);
  const auto s = parse_scenario(
      "name = tiny\nrecipe = HOPF_GK\nsystem = gk\ndt = 0.01\nsteps = 3\nsnapshot_stride = 2\n"
      "checks = gk_residuals, structure, static, bfield_sign\n",
      "t");
  std::ostringstream log;
  const auto a = run_scenario(s, root / "a", log);
  const auto b = run_scenario(s, root / "b", log);
  CHECK(a.verdict == "PASS");
  CHECK(a.exit_code == 0);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  };
  for (const char* f : {"trajectory.csv", "report.txt", "report.csv"}) {
    CAPTURE(f);
    CHECK_FALSE(slurp(root / "a" / f).empty());
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }
  CHECK(std::filesystem::exists(root / "a" / "snapshots" / "step_000000" / "manifest.txt"));
  CHECK(std::filesystem::exists(root / "a" / "snapshots" / "step_000002" / "g.gkf"));
  CHECK(std::filesystem::exists(root / "a" / "snapshots" / "step_000003" / "h.gkf"));
  CHECK(std::filesystem::exists(root / "a" / "final_state" / "j_minus.gkf"));

  // The final state feeds a CUSTOM scenario.
  const auto c = parse_scenario("name = chained\nrecipe = CUSTOM\nsnapshot = " + (root / "a" / "final_state").string() +
                                    "\nchecks = static\n",
                                "t");
  CHECK(run_scenario(c, root / "c", log).verdict == "PASS");
  std::filesystem::remove_all(root);
}
