#include "catalog.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "config.hpp"
#include "runner.hpp"

#ifndef GKFLOW_SCENARIO_DIR_DEFAULT
#define GKFLOW_SCENARIO_DIR_DEFAULT "scenarios"
#endif

namespace gkcli {

namespace fs = std::filesystem;

fs::path scenario_dir() {
  if (const char* env = std::getenv("GKFLOW_SCENARIO_DIR"); env && *env) return env;
  return GKFLOW_SCENARIO_DIR_DEFAULT;
}

std::vector<fs::path> bundled_scenarios() {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(scenario_dir(), ec))
    if (e.path().extension() == ".cfg") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

/// Leading comment block of a scenario file, without the '#'.
std::vector<std::string> scenario_comment(const fs::path& file) {
  std::ifstream is(file);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(is, line) && !line.empty() && line[0] == '#') {
    line.erase(0, 1);
    if (!line.empty() && line[0] == ' ') line.erase(0, 1);
    out.push_back(line);
  }
  return out;
}

}  // namespace

void print_list(std::ostream& os) {
  os << "recipes:\n";
  for (const auto& r : recipe_specs()) os << "  " << std::left << std::setw(20) << r.name << r.doc << '\n';
  os << "check groups:\n";
  for (const auto& c : check_specs()) os << "  " << std::left << std::setw(22) << c.name << c.doc << '\n';
  os << "scenarios (" << scenario_dir().string() << "):\n";
  for (const auto& p : bundled_scenarios()) {
    const auto comment = scenario_comment(p);
    os << "  " << std::left << std::setw(26) << p.stem().string() << (comment.empty() ? "" : comment.front())
       << '\n';
  }
}

void print_keys(std::ostream& os) {
  for (const auto& k : config_keys()) {
    os << std::left << std::setw(26) << k.name << (k.fallback.empty() ? "-" : k.fallback) << "\n    " << k.doc
       << '\n';
  }
}

bool print_explain(std::ostream& os, const std::string& name) {
  for (const auto& r : recipe_specs())
    if (r.name == name) {
      os << "recipe " << r.name << "\n  data: " << r.doc << "\n  exercises: " << r.checks << '\n';
      return true;
    }
  for (const auto& c : check_specs())
    if (c.name == name) {
      os << "check group " << c.name << "\n  " << c.doc << "\n  rows (default tolerance):\n";
      for (const auto& [row, tol] : c.rows) os << "    " << std::left << std::setw(40) << row << fmt(tol) << '\n';
      return true;
    }
  for (const auto& c : check_specs())
    for (const auto& [row, tol] : c.rows)
      if (row == name) {
        os << "check row " << row << " of group " << c.name << "\n  " << c.doc << "\n  default tolerance "
           << fmt(tol) << ", override with tol." << row << '\n';
        return true;
      }
  for (const auto& k : config_keys())
    if (k.name == name) {
      os << "config key " << k.name << " (default " << (k.fallback.empty() ? "none" : k.fallback) << ")\n  "
         << k.doc << '\n';
      return true;
    }
  for (const auto& p : bundled_scenarios())
    if (p.stem().string() == name) {
      os << "scenario " << name << " (" << p.string() << ")\n";
      for (const auto& line : scenario_comment(p)) os << "  " << line << '\n';
      return true;
    }
  return false;
}

}  // namespace gkcli
