#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gkflow/complex_structure.hpp"
#include "gkflow/flows.hpp"

namespace gkflow {

enum class FlowSystem { BField, Pluriclosed, GKCoupled, GaugeFixed };
enum class Scheme { RK4, Euler };
enum class FlowStatus { Ok, Degenerate, NonFinite, CflAbort, Invalid };

std::string to_string(FlowSystem s);
std::string to_string(Scheme s);
std::string to_string(FlowStatus s);
FlowSystem flow_system_from_string(const std::string& s);
Scheme scheme_from_string(const std::string& s);

struct FlowProblem {
  FlowSystem system = FlowSystem::GKCoupled;
  GKState initial;
  double dt = 1e-3;
  int steps = 10;
  Scheme scheme = Scheme::RK4;
  /// dt·λmax(g^{-1})·Σ_a κ_a² ≤ safety, κ_a the largest discrete wavenumber
  /// of axis a; non-positive selects 1.0 (RK4) or 0.5 (Euler).
  double cfl_safety = 0.0;
  /// Pluriclosed flow: +1 evolves with J₊ (H = d^c₊ω₊), −1 with J₋ (H = −d^c₋ω₋).
  int pluriclosed_side = 1;
  PluriclosedOptions pluriclosed{};
  /// Renormalize J± to J² = −1 after every step.
  bool project_j = true;
  /// Residual records every k steps (the first and last step are always recorded).
  int record_stride = 1;
  /// Keep a state snapshot every k steps (0 keeps none).
  int snapshot_stride = 0;
  /// DeTurck reference connection (empty: backend default).
  TensorField gamma0;
  /// Called with (step, t, state) for step = 0..steps after each step.
  std::function<void(int, double, const GKState&)> observer;
};

struct FlowRecord {
  int step = 0;
  double t = 0.0;
  GKResiduals residuals;
  double rc_norm = 0.0;
  double h_norm = 0.0;
  double dh_norm = 0.0;
  double min_eig = 0.0;
  double x_plus_norm = 0.0;
  double x_minus_norm = 0.0;
  double projection = 0.0;
  int cfl_halvings = 0;
};

struct FlowTrajectory {
  FlowStatus status = FlowStatus::Ok;
  int failed_step = -1;
  std::string message;
  std::vector<FlowRecord> records;
  std::vector<std::pair<double, GKState>> snapshots;
  GKState final_state;
  double final_time = 0.0;
  double max_projection = 0.0;
  int max_cfl_halvings = 0;
  bool ok() const { return status == FlowStatus::Ok; }
};

/// Right-hand side of the selected system at a state (J entries are zero
/// for systems that hold J fixed).
GKDerivative flow_rhs(const FlowProblem& p, const GKState& s);

/// Largest stable step: safety/(λmax(g^{-1})·Σ_a κ_a²); +inf on a group.
double cfl_bound(const Metric& g, double safety);
double default_cfl_safety(Scheme s);

FlowTrajectory integrate(const FlowProblem& problem);

/// Residual record of a state (norms are max-abs).
FlowRecord measure(const GKState& s, int step, double t);

/// CSV columns: t, rc_norm, h_norm, dh_norm, nij_plus, nij_minus, r1, r2, r3,
/// compat_plus, compat_minus, min_eig_g, x_plus_norm, x_minus_norm.
void write_trajectory_csv(const FlowTrajectory& tr, std::ostream& os);
const std::vector<std::string>& trajectory_csv_columns();

}  // namespace gkflow
