#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gkcli {

/// Directory holding the bundled *.cfg scenarios: $GKFLOW_SCENARIO_DIR,
/// else the directory configured at build time.
std::filesystem::path scenario_dir();
std::vector<std::filesystem::path> bundled_scenarios();

void print_list(std::ostream& os);
void print_keys(std::ostream& os);
/// Recipe, check group, check row, config key or bundled scenario.
/// Returns false when the name is unknown.
bool print_explain(std::ostream& os, const std::string& name);

}  // namespace gkcli
