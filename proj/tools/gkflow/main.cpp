#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "catalog.hpp"
#include "config.hpp"
#include "runner.hpp"
#include "gkflow/snapshot.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"gkflow: generalized Kahler flows on tori and Lie groups"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario config and write its artifacts");
  std::string config;
  std::string output_root;
  run->add_option("config", config, "scenario file (key = value lines)")->required();
  run->add_option("--output-root,-o", output_root,
                  "output root (default $GKFLOW_OUTPUT_ROOT, else ./gkflow-output); results go to <root>/<name>");

  auto* check = app.add_subcommand("check", "parse a scenario config and print the resolved name and recipe");
  std::string check_config;
  check->add_option("config", check_config, "scenario file")->required();

  auto* describe = app.add_subcommand("describe", "list recipes, checks and scenarios, or explain one of them");
  bool list = false;
  bool keys = false;
  std::string explain;
  describe->add_flag("--list", list, "list recipes, check groups and bundled scenarios");
  describe->add_flag("--keys", keys, "list configuration keys with defaults");
  describe->add_option("--explain", explain, "explain a recipe, check group, check row, key or scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gkcli::kExitUsage;
  }

  if (*describe) {
    if (!explain.empty()) {
      if (!gkcli::print_explain(std::cout, explain)) {
        std::cerr << "gkflow: unknown name '" << explain << "' (see gkflow describe --list)\n";
        return gkcli::kExitUsage;
      }
      return gkcli::kExitOk;
    }
    if (keys) {
      gkcli::print_keys(std::cout);
      return gkcli::kExitOk;
    }
    gkcli::print_list(std::cout);
    return gkcli::kExitOk;
  }

  const std::string& file = *run ? config : check_config;
  gkcli::Scenario s;
  try {
    s = gkcli::load_scenario(file);
  } catch (const gkcli::ConfigError& e) {
    std::cerr << "gkflow: config error: " << e.what() << "\n" << app.help();
    return gkcli::kExitUsage;
  }
  if (*check) {
    std::cout << "scenario " << s.name << " recipe " << s.recipe << " checks";
    for (const auto& c : s.checks) std::cout << ' ' << c;
    std::cout << '\n';
    return gkcli::kExitOk;
  }

  fs::path root = output_root;
  if (root.empty()) {
    const char* env = std::getenv("GKFLOW_OUTPUT_ROOT");
    root = env && *env ? env : "gkflow-output";
  }
  const fs::path dir = root / s.name;
  try {
    const auto out = gkcli::run_scenario(s, dir, std::cerr);
    std::ifstream report(dir / "report.txt");
    std::cout << report.rdbuf();
    return out.exit_code;
  } catch (const gkflow::SnapshotError& e) {
    std::cerr << "gkflow: snapshot error: " << e.what() << "\n";
    return gkcli::kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "gkflow: " << e.what() << "\n";
    return gkcli::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "gkflow: error: " << e.what() << "\n";
    return gkcli::kExitDegenerate;
  }
}
