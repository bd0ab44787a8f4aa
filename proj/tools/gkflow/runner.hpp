#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"
#include "gkflow/verification.hpp"

namespace gkcli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitDegenerate = 3,
  kExitIo = 4,
};

struct RunOutcome {
  gkflow::CheckList rows;
  std::string status = "OK";  ///< OK or the flow status that stopped the run
  std::string verdict;        ///< PASS, FAIL, EXPECTED_FAIL, UNEXPECTED_PASS, DEGENERATE
  int exit_code = kExitOk;
};

/// Verdict and exit code from the check rows, the run status and the
/// expectation of the scenario.
void finalize(RunOutcome& out, bool expect_fail);

/// Runs a scenario and writes its artifacts into `out_dir`:
/// report.txt, report.csv, and (when produced) trajectory.csv, gauge.csv,
/// transport.csv, hopf.csv, convergence.csv, snapshots/, final_state/.
/// Progress goes to `log`.
RunOutcome run_scenario(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& log);

/// "%.17g"
std::string fmt(double v);

}  // namespace gkcli
