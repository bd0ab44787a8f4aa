#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gkcli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& what) {
  throw ConfigError("key '" + key + "': " + what + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "expected a number");
  }
  if (used != v.size() || !std::isfinite(d)) bad_value(key, v, "expected a finite number");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "expected an integer");
  }
  if (used != v.size()) bad_value(key, v, "expected an integer");
  return i;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "expected true or false");
}

std::vector<std::string> split_list(const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& tok : split_list(v)) out.push_back(static_cast<int>(to_int(key, tok)));
  if (out.empty()) bad_value(key, v, "expected a list of integers");
  return out;
}

bool is_tolerance_row(const std::string& row) {
  for (const auto& c : check_specs())
    for (const auto& r : c.rows)
      if (r.first == row) return true;
  return false;
}

}  // namespace

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"name", "", "scenario name; also the output subdirectory (required)"},
      {"recipe", "", "initial data: FLAT_KAHLER_TORUS, PERTURBED_TORUS, TORUS_GK, HOPF_GK, HOPF_STATIC, CUSTOM (required)"},
      {"resolution", "8", "grid points per axis: one value for all axes or four values (torus recipes)"},
      {"stencil_order", "4", "finite-difference order 2, 4, 6, 8, or 0 for spectral differentiation"},
      {"seed", "1", "random seed of PERTURBED_TORUS"},
      {"amplitude", "0.1", "largest Hessian entry of the PERTURBED_TORUS potential"},
      {"modes", "3", "number of Fourier modes in the PERTURBED_TORUS potential"},
      {"epsilon", "0.2", "metric modulation of TORUS_GK"},
      {"radius", "1", "three-sphere radius of HOPF_GK"},
      {"snapshot", "", "state directory for CUSTOM (relative to the config file)"},
      {"threads", "1", "worker threads; recorded only, evaluation is sequential and results do not depend on it"},
      {"system", "none", "flow: none, bfield (J held fixed), pluriclosed, gk, gauge_fixed"},
      {"scheme", "rk4", "time stepper: rk4 or euler"},
      {"dt", "0.001", "time step"},
      {"steps", "0", "number of steps"},
      {"cfl_safety", "0", "stability factor s in dt*lmax(g^-1)*sum k_a^2 <= s; 0 selects the scheme default"},
      {"project_j", "true", "renormalize J to J^2 = -1 after every step"},
      {"pluriclosed_side", "1", "pluriclosed flow with J_plus (1) or J_minus (-1)"},
      {"record_stride", "1", "trajectory CSV row every k steps"},
      {"snapshot_stride", "0", "state snapshot every k steps (0: none)"},
      {"checks", "", "comma-separated check groups (see describe --list)"},
      {"expect", "pass", "pass, or fail for a negative-control scenario (EXPECT_FAIL)"},
      {"gauge.compare_stride", "1", "compare the transported trajectories every k steps"},
      {"gauge.diffeo_substeps", "1", "RK4 particle substeps per sample interval"},
      {"gauge.bfield_reference", "true", "also run the B-field flow and compare against it"},
      {"gauge.minus_sign", "1", "sign of the generator of the J_minus diffeomorphism (-1: wrong-sign control)"},
      {"static.lambda", "0", "soliton constant of the static datum"},
      {"static.sweep_lo", "-1", "lower end of the lambda sweep"},
      {"static.sweep_hi", "1", "upper end of the lambda sweep"},
      {"hopf.samples", "100", "number of Hopf sample points"},
      {"hopf.seed", "2024", "seed of the Hopf sample points"},
      {"hopf.r_min", "0.5", "smallest sample radius"},
      {"hopf.r_max", "2", "largest sample radius"},
      {"identities.seed", "12345", "seed of the randomized identity suite"},
      {"convergence.order", "4", "stencil order of the self-convergence study"},
      {"convergence.resolutions", "16 32 64", "three doubling resolutions"},
      {"tol.<row>", "", "tolerance override for a named check row"},
  };
  return keys;
}

const std::vector<CheckSpec>& check_specs() {
  static const std::vector<CheckSpec> specs = {
      {"gk_residuals", "largest GK residual (compatibility, Nijenhuis, r1, r2, r3) over the trajectory",
       {{"gk_residual_max", 1e-7}}},
      {"structure", "largest |dH| and |J^2 + Id| over the trajectory", {{"dh_max", 1e-8}, {"j_squared_max", 1e-10}}},
      {"bfield_sign", "bfield_rhs(g, -H) equals (dg, -dH) on the initial state", {{"bfield_sign_symmetry", 1e-15}}},
      {"gauge_equivalence",
       "two pluriclosed runs transported by their gauge diffeomorphisms agree with each other and with the B-field flow",
       {{"gauge_metric", 1e-6}, {"gauge_dc", 1e-6}, {"gauge_bfield_metric", 1e-6}}},
      {"transport_derivative",
       "forward difference of the transported J against the J-flow right-hand side; first order in dt",
       {{"transport_derivative_order", 0.25}}},
      {"static",
       "soliton residual, integral identity, Ricci bound, d*H, Lee form, lambda sweep and the negative-lambda control",
       {{"soliton_residual", 1e-10},
        {"integral_identity_gap", 1e-6},
        {"ricci_lower_bound", 1e-9},
        {"codifferential_h", 1e-9},
        {"lee_theta_minus_star_h", 1e-8},
        {"lee_d_theta", 1e-8},
        {"lambda_sweep_argmin", 1e-6},
        {"negative_lambda_control", 0.5}}},
      {"hopf", "pointwise Hopf metric checks on local stencil patches",
       {{"hopf_s_minus_q", 1e-7},
        {"hopf_surface_identity", 1e-8},
        {"hopf_pluriclosed_rhs", 1e-7},
        {"hopf_homogeneity", 1e-12},
        {"hopf_invariants", 1e-6}}},
      {"identities", "randomized algebraic identity suite",
       {{"first_bianchi", 1e-7},
        {"riemann_antisymmetry", 1e-12},
        {"ricci_symmetry", 1e-9},
        {"metric_compatibility", 1e-9},
        {"d_squared", 1e-9},
        {"hodge_involution_2forms", 1e-10},
        {"d_codifferential_adjoint", 1e-8},
        {"h_squared_semidefinite", 1e-10},
        {"nijenhuis_coordinate_vs_bracket", 1e-9},
        {"nijenhuis_coordinate_vs_bracket_group", 1e-12},
        {"lie_derivative_vs_transport_order", 0.1},
        {"flat_torus_vs_abelian_group", 1e-10}}},
      {"convergence", "Richardson self-convergence order of d, d*, Laplacian and Riemann (|p - order|)",
       {{"order_exterior_derivative", 0.5},
        {"order_codifferential", 0.5},
        {"order_laplace_beltrami", 0.5},
        {"order_riemann", 0.5}}},
  };
  return specs;
}

const std::vector<RecipeSpec>& recipe_specs() {
  static const std::vector<RecipeSpec> specs = {
      {"FLAT_KAHLER_TORUS", "flat T^4, g = identity, H = 0, J_plus = J_minus = J0",
       "every flow is stationary; all residual columns stay at roundoff"},
      {"PERTURBED_TORUS", "Kahler T^4 with omega = omega0 + i ddbar(phi), phi a seeded random trigonometric potential, H = 0",
       "Kahler-Ricci behaviour of the coupled system; H stays zero and J stays parallel"},
      {"TORUS_GK",
       "non-Kahler generalized Kahler T^4 on an {n,m,n,m} grid: g = (1+eC)(dx0^2+dx1^2) + (1-eC)(dx2^2+dx3^2), "
       "C = cos(x0+x2), J_minus reverses the second plane, H = d^c_+ omega_+",
       "preservation of the GK equations under the coupled flow, failure of the naive flow with frozen J, gauge "
       "equivalence of the two pluriclosed flows with the B-field flow, transport derivative of J"},
      {"HOPF_GK",
       "S^3 x S^1 as SU(2) x U(1) with the bi-invariant metric, J_plus left-invariant, J_minus right-invariant, "
       "H = d^c_+ omega_+ (exact frame algebra)",
       "static soliton with lambda = 0: Ricci = H^2/4, d*H = 0, integral identity, parallel Lee form theta = *H, "
       "lambda sweep minimized at 0; gauge-equivalence pipeline on a static point"},
      {"HOPF_STATIC",
       "Hopf metric i rho^-2 ddbar(rho^2) on C^2 minus the origin, checked pointwise on local stencil patches",
       "staticity S - Q = 0, surface identity Q = |T|^2 h / 2, vanishing pluriclosed right-hand side, dilation "
       "invariance, curvature invariants of the round cylinder R x S^3(sqrt 2)"},
      {"CUSTOM", "a GK state snapshot directory written by a previous run (key snapshot)",
       "any flow and check on user-supplied data"},
  };
  return specs;
}

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin) {
  std::set<std::string> known;
  for (const auto& k : config_keys())
    if (k.name != "tol.<row>") known.insert(k.name);
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    const bool tol_key = key.rfind("tol.", 0) == 0;
    if (tol_key) {
      if (!is_tolerance_row(key.substr(4))) throw ConfigError(where + "unknown tolerance row '" + key.substr(4) + "'");
    } else if (!known.count(key)) {
      throw ConfigError(where + "unknown key '" + key + "'");
    }
    if (out.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    out[key] = value;
  }
  return out;
}

double Scenario::tolerance(const std::string& row) const {
  auto it = tol.find(row);
  if (it != tol.end()) return it->second;
  for (const auto& c : check_specs())
    for (const auto& r : c.rows)
      if (r.first == row) return r.second;
  throw ConfigError("no tolerance defined for row '" + row + "'");
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  auto kv = parse_key_values(text, origin);
  auto get = [&kv](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it != kv.end()) return it->second;
    for (const auto& k : config_keys())
      if (k.name == key) return k.fallback;
    return "";
  };
  Scenario s;
  s.name = get("name");
  if (s.name.empty()) throw ConfigError(origin + ": missing required key 'name'");
  if (s.name.find_first_of("/\\ \t") != std::string::npos || s.name == "." || s.name == "..")
    throw ConfigError("key 'name': must be a plain word usable as a directory name");
  s.recipe = get("recipe");
  if (s.recipe.empty()) throw ConfigError(origin + ": missing required key 'recipe'");
  bool recipe_ok = false;
  for (const auto& r : recipe_specs()) recipe_ok |= r.name == s.recipe;
  if (!recipe_ok) bad_value("recipe", s.recipe, "unknown recipe");

  s.resolution = to_int_list("resolution", get("resolution"));
  if (s.resolution.size() == 1) s.resolution.assign(4, s.resolution.front());
  if (s.resolution.size() != 4) bad_value("resolution", get("resolution"), "expected one or four values");
  s.stencil_order = static_cast<int>(to_int("stencil_order", get("stencil_order")));
  if (s.stencil_order != 0 && s.stencil_order != 2 && s.stencil_order != 4 && s.stencil_order != 6 &&
      s.stencil_order != 8)
    bad_value("stencil_order", get("stencil_order"), "expected 0, 2, 4, 6 or 8");
  s.seed = static_cast<unsigned long long>(to_int("seed", get("seed")));
  s.amplitude = to_double("amplitude", get("amplitude"));
  s.modes = static_cast<int>(to_int("modes", get("modes")));
  s.epsilon = to_double("epsilon", get("epsilon"));
  s.radius = to_double("radius", get("radius"));
  if (!(s.radius > 0.0)) bad_value("radius", get("radius"), "must be positive");
  s.snapshot = get("snapshot");
  if (s.recipe == "CUSTOM" && s.snapshot.empty()) throw ConfigError("recipe CUSTOM requires key 'snapshot'");
  s.threads = static_cast<int>(to_int("threads", get("threads")));
  if (s.threads < 1) bad_value("threads", get("threads"), "must be at least 1");

  const std::string system = get("system");
  if (system != "none") {
    s.has_flow = true;
    try {
      s.system = gkflow::flow_system_from_string(system);
    } catch (const std::exception&) {
      bad_value("system", system, "expected none, bfield, pluriclosed, gk or gauge_fixed");
    }
  }
  try {
    s.scheme = gkflow::scheme_from_string(get("scheme"));
  } catch (const std::exception&) {
    bad_value("scheme", get("scheme"), "expected rk4 or euler");
  }
  s.dt = to_double("dt", get("dt"));
  if (!(s.dt > 0.0)) bad_value("dt", get("dt"), "must be positive");
  s.steps = static_cast<int>(to_int("steps", get("steps")));
  if (s.steps < 0) bad_value("steps", get("steps"), "must be non-negative");
  s.cfl_safety = to_double("cfl_safety", get("cfl_safety"));
  s.project_j = to_bool("project_j", get("project_j"));
  s.pluriclosed_side = static_cast<int>(to_int("pluriclosed_side", get("pluriclosed_side")));
  if (s.pluriclosed_side != 1 && s.pluriclosed_side != -1)
    bad_value("pluriclosed_side", get("pluriclosed_side"), "expected 1 or -1");
  s.record_stride = static_cast<int>(to_int("record_stride", get("record_stride")));
  if (s.record_stride < 1) bad_value("record_stride", get("record_stride"), "must be at least 1");
  s.snapshot_stride = static_cast<int>(to_int("snapshot_stride", get("snapshot_stride")));
  if (s.snapshot_stride < 0) bad_value("snapshot_stride", get("snapshot_stride"), "must be non-negative");

  std::set<std::string> seen;
  for (const auto& c : split_list(get("checks"))) {
    bool ok = false;
    for (const auto& spec : check_specs()) ok |= spec.name == c;
    if (!ok) bad_value("checks", c, "unknown check group");
    if (seen.insert(c).second) s.checks.push_back(c);
  }
  const std::string expect = get("expect");
  if (expect == "fail") s.expect_fail = true;
  else if (expect != "pass") bad_value("expect", expect, "expected pass or fail");
  for (const auto& [k, v] : kv)
    if (k.rfind("tol.", 0) == 0) {
      const double t = to_double(k, v);
      if (!(t >= 0.0)) bad_value(k, v, "tolerance must be non-negative");
      s.tol[k.substr(4)] = t;
    }

  s.gauge_compare_stride = static_cast<int>(to_int("gauge.compare_stride", get("gauge.compare_stride")));
  s.gauge_diffeo_substeps = static_cast<int>(to_int("gauge.diffeo_substeps", get("gauge.diffeo_substeps")));
  if (s.gauge_compare_stride < 1 || s.gauge_diffeo_substeps < 1)
    throw ConfigError("gauge.compare_stride and gauge.diffeo_substeps must be at least 1");
  s.gauge_bfield_reference = to_bool("gauge.bfield_reference", get("gauge.bfield_reference"));
  s.gauge_minus_sign = to_double("gauge.minus_sign", get("gauge.minus_sign"));
  s.static_lambda = to_double("static.lambda", get("static.lambda"));
  s.sweep_lo = to_double("static.sweep_lo", get("static.sweep_lo"));
  s.sweep_hi = to_double("static.sweep_hi", get("static.sweep_hi"));
  if (!(s.sweep_hi > s.sweep_lo)) throw ConfigError("static.sweep_hi must exceed static.sweep_lo");
  s.hopf_samples = static_cast<int>(to_int("hopf.samples", get("hopf.samples")));
  if (s.hopf_samples < 1) bad_value("hopf.samples", get("hopf.samples"), "must be at least 1");
  s.hopf_seed = static_cast<unsigned long long>(to_int("hopf.seed", get("hopf.seed")));
  s.hopf_r_min = to_double("hopf.r_min", get("hopf.r_min"));
  s.hopf_r_max = to_double("hopf.r_max", get("hopf.r_max"));
  if (!(s.hopf_r_min > 0.0 && s.hopf_r_max >= s.hopf_r_min))
    throw ConfigError("hopf.r_min must be positive and not exceed hopf.r_max");
  s.identities_seed = static_cast<unsigned long long>(to_int("identities.seed", get("identities.seed")));
  s.convergence_order = static_cast<int>(to_int("convergence.order", get("convergence.order")));
  s.convergence_resolutions = to_int_list("convergence.resolutions", get("convergence.resolutions"));
  if (s.convergence_resolutions.size() != 3)
    bad_value("convergence.resolutions", get("convergence.resolutions"), "expected three values");

  const bool needs_flow = std::count(s.checks.begin(), s.checks.end(), "gk_residuals") ||
                          std::count(s.checks.begin(), s.checks.end(), "structure");
  if (needs_flow && !s.has_flow) throw ConfigError("checks gk_residuals and structure need a flow (key 'system')");
  const bool needs_steps = std::count(s.checks.begin(), s.checks.end(), "gauge_equivalence") ||
                           std::count(s.checks.begin(), s.checks.end(), "transport_derivative");
  if (needs_steps && s.steps < 2) throw ConfigError("gauge checks need steps >= 2");
  const bool needs_state = needs_steps || std::count(s.checks.begin(), s.checks.end(), "static") ||
                           std::count(s.checks.begin(), s.checks.end(), "bfield_sign");
  if (s.recipe == "HOPF_STATIC" && (s.has_flow || needs_state))
    throw ConfigError("recipe HOPF_STATIC has no global state; it only supports the hopf check");
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  Scenario s = parse_scenario(buf.str(), file.string());
  if (s.recipe == "CUSTOM") {
    std::filesystem::path p(s.snapshot);
    if (p.is_relative()) s.snapshot = (file.parent_path() / p).string();
  }
  return s;
}

}  // namespace gkcli
