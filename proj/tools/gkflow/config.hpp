#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkflow/integrator.hpp"

namespace gkcli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One documented configuration key.
struct KeySpec {
  std::string name;
  std::string fallback;  ///< default value ("" = required or unset)
  std::string doc;
};
const std::vector<KeySpec>& config_keys();

/// Check groups and the rows (tolerance names) each one emits.
struct CheckSpec {
  std::string name;
  std::string doc;
  std::vector<std::pair<std::string, double>> rows;  ///< row name, default tolerance
};
const std::vector<CheckSpec>& check_specs();

/// Initial-data recipes.
struct RecipeSpec {
  std::string name;
  std::string doc;
  std::string checks;  ///< what the recipe is meant to exercise
};
const std::vector<RecipeSpec>& recipe_specs();

/// Raw `key = value` pairs; '#' starts a comment. Unknown keys, duplicate
/// keys and malformed lines are errors.
std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin);

struct Scenario {
  std::string name;
  std::string recipe;
  std::vector<int> resolution;
  int stencil_order = 4;
  unsigned long long seed = 1;
  double amplitude = 0.1;
  int modes = 3;
  double epsilon = 0.2;
  double radius = 1.0;
  std::string snapshot;
  int threads = 1;

  bool has_flow = false;
  gkflow::FlowSystem system = gkflow::FlowSystem::GKCoupled;
  gkflow::Scheme scheme = gkflow::Scheme::RK4;
  double dt = 1e-3;
  int steps = 0;
  double cfl_safety = 0.0;
  bool project_j = true;
  int pluriclosed_side = 1;
  int record_stride = 1;
  int snapshot_stride = 0;

  std::vector<std::string> checks;
  bool expect_fail = false;
  std::map<std::string, double> tol;

  int gauge_compare_stride = 1;
  int gauge_diffeo_substeps = 1;
  bool gauge_bfield_reference = true;
  double gauge_minus_sign = 1.0;

  double static_lambda = 0.0;
  double sweep_lo = -1.0;
  double sweep_hi = 1.0;

  int hopf_samples = 100;
  unsigned long long hopf_seed = 2024;
  double hopf_r_min = 0.5;
  double hopf_r_max = 2.0;

  unsigned long long identities_seed = 12345;
  int convergence_order = 4;
  std::vector<int> convergence_resolutions{16, 32, 64};

  double tolerance(const std::string& row) const;
};

Scenario parse_scenario(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::filesystem::path& file);

}  // namespace gkcli
