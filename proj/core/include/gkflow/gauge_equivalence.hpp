#pragma once

#include <string>
#include <vector>

#include "gkflow/gauge_transport.hpp"
#include "gkflow/integrator.hpp"

namespace gkflow {

/// A pluriclosed trajectory on (M, J_side) with the gauge field X(t_k)
/// sampled at every step (on J's backend).
struct PluriclosedRun {
  int side = 1;
  std::vector<double> times;
  std::vector<TensorField> gauge_fields;
  FlowTrajectory trajectory;  ///< snapshots every `stride` steps (and the last)
  int stride = 1;
};

struct GaugeEquivalenceOptions {
  double dt = 5e-3;
  int steps = 10;
  Scheme scheme = Scheme::RK4;
  double cfl_safety = 0.0;
  int compare_stride = 1;     ///< compare every k steps (and at the end)
  int diffeo_substeps = 1;    ///< RK4 particle steps per sample interval
  double diffeo_error_bound = 1e-6;
  /// Sign of the generator used for φ₋; −1 gives the wrong-sign control.
  double minus_generator_sign = 1.0;
  bool bfield_reference = true;
  PluriclosedOptions pluriclosed{};
};

struct GaugeEquivalenceRow {
  double t = 0.0;
  double metric = 0.0;         ///< ‖φ₊*g₊ − φ₋*g₋‖
  double dc_plus = 0.0;        ///< ‖φ₊*(d^c₊ω₊) − H(t)‖
  double dc_minus = 0.0;       ///< ‖φ₋*(d^c₋ω₋) + H(t)‖
  double bfield_metric = 0.0;  ///< ‖φ₊*g₊ − g_B(t/2)‖ (B-field reference only)
};

struct GaugeEquivalenceReport {
  FlowStatus status = FlowStatus::Ok;
  std::string message;
  std::vector<GaugeEquivalenceRow> rows;
  double max_metric = 0.0;
  double max_dc_plus = 0.0;
  double max_dc_minus = 0.0;
  double max_bfield_metric = 0.0;
  double min_jacobian_det = 1.0;
  double max_step_error = 0.0;
  bool ok() const { return status == FlowStatus::Ok; }
  double max_dc() const { return std::max(max_dc_plus, max_dc_minus); }
};

/// Runs pluriclosed flow for one side, recording X(t_k) at every step.
/// Snapshots are kept every `stride` steps.
PluriclosedRun run_pluriclosed(const GKState& initial, int side, const GaugeEquivalenceOptions& opt, int stride);

/// B-field reference run in its own time τ = t/2 (step dt/2).
FlowTrajectory run_bfield_reference(const GKState& initial, const GaugeEquivalenceOptions& opt, int stride);

/// Flow generated by sign·½X(t) from the samples of a run.
DiffeoFlow gauge_diffeo(const PluriclosedRun& run, double sign, const GaugeEquivalenceOptions& opt);

/// Compares the two transported trajectories (and the B-field reference when
/// given). Throws std::invalid_argument on mismatched time grids.
GaugeEquivalenceReport verify_gauge_equivalence(const PluriclosedRun& plus, const PluriclosedRun& minus,
                                                const GaugeEquivalenceOptions& opt,
                                                const FlowTrajectory* bfield = nullptr);

/// Both pluriclosed runs, the reference run and the comparison.
GaugeEquivalenceReport gauge_equivalence_pipeline(const GKState& initial, const GaugeEquivalenceOptions& opt);

/// ‖(φ_{t+δ}*J − φ_t*J)/δ − ½ j_rhs(φ_t*g, φ_t*J)‖ at step k of a run with
/// snapshots at every step (δ = dt).
struct TransportDerivativeCheck {
  double t = 0.0;
  double dt = 0.0;
  double residual = 0.0;
  double rhs_norm = 0.0;
};
TransportDerivativeCheck transport_derivative_check(const PluriclosedRun& run, const DiffeoFlow& phi, std::size_t k);

}  // namespace gkflow
