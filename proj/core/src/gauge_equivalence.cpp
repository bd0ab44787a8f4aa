#include "gkflow/gauge_equivalence.hpp"

#include <cmath>
#include <stdexcept>

#include "gkflow/forms.hpp"

namespace gkflow {

namespace {

constexpr double kMirrorTol = 1e-10;

const TensorField& side_j(const GKState& s, int side) { return side > 0 ? s.j_plus : s.j_minus; }

FlowProblem base_problem(const GKState& initial, const GaugeEquivalenceOptions& opt) {
  FlowProblem p;
  p.initial = initial;
  p.dt = opt.dt;
  p.steps = opt.steps;
  p.scheme = opt.scheme;
  p.cfl_safety = opt.cfl_safety;
  p.pluriclosed = opt.pluriclosed;
  p.project_j = false;
  p.record_stride = std::max(1, opt.steps);
  return p;
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

// Pullback of a field living on `home` by a flow on another (opposite) backend.
TensorField pull_via(const DiffeoFlow& phi, std::size_t k, const TensorField& t) {
  TensorField local = mirror_field(t, phi.backend(), kMirrorTol);
  return mirror_field(pullback(phi, k, local), t.backend(), kMirrorTol);
}

// d^cω of the given side evaluated on J's backend and mapped back.
TensorField dc_form(const GKState& s, int side) {
  const TensorField& j = side_j(s, side);
  Metric gj = mirror_metric(s.g, j.backend(), kMirrorTol);
  return mirror_field(d_c(kahler_form(gj, j), j), s.g.backend(), kMirrorTol);
}

}  // namespace

PluriclosedRun run_pluriclosed(const GKState& initial, int side, const GaugeEquivalenceOptions& opt, int stride) {
  PluriclosedRun run;
  run.side = side;
  run.stride = std::max(1, stride);
  FlowProblem p = base_problem(initial, opt);
  p.system = FlowSystem::Pluriclosed;
  p.pluriclosed_side = side;
  p.snapshot_stride = run.stride;
  p.observer = [&run, side](int, double t, const GKState& s) {
    const TensorField& j = side_j(s, side);
    run.times.push_back(t);
    run.gauge_fields.push_back(gauge_vector_field(mirror_metric(s.g, j.backend(), kMirrorTol), j));
  };
  run.trajectory = integrate(p);
  return run;
}

FlowTrajectory run_bfield_reference(const GKState& initial, const GaugeEquivalenceOptions& opt, int stride) {
  FlowProblem p = base_problem(initial, opt);
  p.system = FlowSystem::BField;
  p.dt = 0.5 * opt.dt;
  p.snapshot_stride = std::max(1, stride);
  return integrate(p);
}

DiffeoFlow gauge_diffeo(const PluriclosedRun& run, double sign, const GaugeEquivalenceOptions& opt) {
  if (run.times.size() < 2) throw std::invalid_argument("gauge_diffeo: run has fewer than two samples");
  SampledVectorField x(run.times, run.gauge_fields, 0.5 * sign);
  DiffeoOptions d;
  d.substeps = opt.diffeo_substeps;
  d.error_bound = opt.diffeo_error_bound;
  d.store_stride = static_cast<std::size_t>(run.stride);
  return integrate_diffeo(x, run.gauge_fields.front().backend(), run.times, d);
}

GaugeEquivalenceReport verify_gauge_equivalence(const PluriclosedRun& plus, const PluriclosedRun& minus,
                                                const GaugeEquivalenceOptions& opt, const FlowTrajectory* bfield) {
  GaugeEquivalenceReport rep;
  for (const PluriclosedRun* r : {&plus, &minus}) {
    if (!r->trajectory.ok()) {
      rep.status = r->trajectory.status;
      rep.message = (r->side > 0 ? "plus run: " : "minus run: ") + r->trajectory.message;
      return rep;
    }
  }
  if (bfield && !bfield->ok()) {
    rep.status = bfield->status;
    rep.message = "B-field reference: " + bfield->message;
    return rep;
  }
  if (plus.side != 1 || minus.side != -1) throw std::invalid_argument("verify_gauge_equivalence: sides must be +1 and -1");
  if (plus.times.size() != minus.times.size() || plus.stride != minus.stride)
    throw std::invalid_argument("verify_gauge_equivalence: trajectory time grids mismatch");
  for (std::size_t k = 0; k < plus.times.size(); ++k)
    if (!same_time(plus.times[k], minus.times[k]))
      throw std::invalid_argument("verify_gauge_equivalence: trajectory time grids mismatch");
  const auto& sp = plus.trajectory.snapshots;
  const auto& sm = minus.trajectory.snapshots;
  if (sp.size() != sm.size()) throw std::invalid_argument("verify_gauge_equivalence: snapshot grids mismatch");
  if (bfield && bfield->snapshots.size() != sp.size())
    throw std::invalid_argument("verify_gauge_equivalence: B-field reference grid mismatch");

  DiffeoFlow phi_p = gauge_diffeo(plus, 1.0, opt);
  DiffeoFlow phi_m = gauge_diffeo(minus, opt.minus_generator_sign, opt);
  if (phi_p.num_times() != sp.size() || phi_m.num_times() != sm.size())
    throw std::invalid_argument("verify_gauge_equivalence: diffeo and snapshot grids mismatch");
  rep.min_jacobian_det = std::min(phi_p.min_jacobian_determinant(), phi_m.min_jacobian_determinant());
  rep.max_step_error = std::max(phi_p.max_step_error(), phi_m.max_step_error());

  for (std::size_t k = 0; k < sp.size(); ++k) {
    const double t = sp[k].first;
    if (!same_time(t, sm[k].first) || !same_time(t, phi_p.times()[k]) || !same_time(t, phi_m.times()[k]))
      throw std::invalid_argument("verify_gauge_equivalence: trajectory time grids mismatch");
    const GKState& a = sp[k].second;
    const GKState& b = sm[k].second;
    TensorField gp = pull_via(phi_p, k, a.g.tensor());
    TensorField gm = pull_via(phi_m, k, b.g.tensor());
    TensorField hp = pull_via(phi_p, k, dc_form(a, 1));
    TensorField hm = pull_via(phi_m, k, dc_form(b, -1));

    GaugeEquivalenceRow row;
    row.t = t;
    row.metric = max_difference(gp, gm);
    if (bfield) {
      const auto& ref = bfield->snapshots[k];
      if (!same_time(2.0 * ref.first, t))
        throw std::invalid_argument("verify_gauge_equivalence: B-field reference time mismatch");
      const TensorField& h = ref.second.h;
      TensorField d = hp;
      d -= h;
      row.dc_plus = d.max_abs();
      d = hm;
      d += h;
      row.dc_minus = d.max_abs();
      row.bfield_metric = max_difference(gp, ref.second.g.tensor());
    } else {
      // H(t) = ½(φ₊*(d^c₊ω₊) − φ₋*(d^c₋ω₋)); both identities share one residual.
      TensorField d = hp;
      d += hm;
      row.dc_plus = row.dc_minus = 0.5 * d.max_abs();
    }
    rep.max_metric = std::max(rep.max_metric, row.metric);
    rep.max_dc_plus = std::max(rep.max_dc_plus, row.dc_plus);
    rep.max_dc_minus = std::max(rep.max_dc_minus, row.dc_minus);
    rep.max_bfield_metric = std::max(rep.max_bfield_metric, row.bfield_metric);
    rep.rows.push_back(row);
  }
  return rep;
}

GaugeEquivalenceReport gauge_equivalence_pipeline(const GKState& initial, const GaugeEquivalenceOptions& opt) {
  const int stride = std::max(1, opt.compare_stride);
  PluriclosedRun plus = run_pluriclosed(initial, 1, opt, stride);
  PluriclosedRun minus = run_pluriclosed(initial, -1, opt, stride);
  if (!opt.bfield_reference) return verify_gauge_equivalence(plus, minus, opt, nullptr);
  FlowTrajectory ref = run_bfield_reference(initial, opt, stride);
  return verify_gauge_equivalence(plus, minus, opt, &ref);
}

TransportDerivativeCheck transport_derivative_check(const PluriclosedRun& run, const DiffeoFlow& phi, std::size_t k) {
  if (run.stride != 1) throw std::invalid_argument("transport_derivative_check: needs snapshots at every step");
  const auto& snaps = run.trajectory.snapshots;
  if (k + 1 >= snaps.size() || k + 1 >= phi.num_times())
    throw std::out_of_range("transport_derivative_check: step out of range");
  const GKState& s = snaps[k].second;
  const TensorField& j = side_j(s, run.side);
  TensorField j0 = pullback(phi, k, j);
  TensorField j1 = pullback(phi, k + 1, side_j(snaps[k + 1].second, run.side));
  Metric g(pull_via(phi, k, s.g.tensor()));
  Metric gj = mirror_metric(g, j.backend(), kMirrorTol);
  TensorField rhs = j_rhs(gj, j0);
  rhs *= 0.5;
  const double delta = phi.times()[k + 1] - phi.times()[k];
  TensorField fd = j1;
  fd -= j0;
  fd *= 1.0 / delta;
  TransportDerivativeCheck out;
  out.t = phi.times()[k];
  out.dt = delta;
  out.residual = max_difference(fd, rhs);
  out.rhs_norm = rhs.max_abs();
  return out;
}

}  // namespace gkflow
