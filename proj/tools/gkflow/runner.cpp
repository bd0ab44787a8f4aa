#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gkflow/gauge_equivalence.hpp"
#include "gkflow/integrator.hpp"
#include "gkflow/scenarios.hpp"
#include "gkflow/snapshot.hpp"
#include "gkflow/static_analysis.hpp"

namespace gkcli {

namespace fs = std::filesystem;
using gkflow::CheckList;
using gkflow::make_check;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string fmt_tol(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool wants(const Scenario& s, const std::string& check) {
  return std::find(s.checks.begin(), s.checks.end(), check) != s.checks.end();
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  return os;
}

gkflow::GKState initial_state(const Scenario& s, double* t0) {
  *t0 = 0.0;
  if (s.recipe == "FLAT_KAHLER_TORUS") return gkflow::flat_kahler_torus(s.resolution, s.stencil_order);
  if (s.recipe == "PERTURBED_TORUS")
    return gkflow::perturbed_kahler_torus(s.resolution, s.seed, s.amplitude, s.stencil_order, s.modes);
  if (s.recipe == "TORUS_GK") return gkflow::torus_gk_state(s.resolution.front(), s.epsilon, s.stencil_order);
  if (s.recipe == "HOPF_GK") return gkflow::hopf_gk_state(s.radius);
  if (s.recipe == "CUSTOM") return gkflow::load_state(s.snapshot, t0);
  throw std::logic_error("recipe without a global state: " + s.recipe);
}

gkflow::GaugeEquivalenceOptions gauge_options(const Scenario& s) {
  gkflow::GaugeEquivalenceOptions o;
  o.dt = s.dt;
  o.steps = s.steps;
  o.scheme = s.scheme;
  o.cfl_safety = s.cfl_safety;
  o.compare_stride = s.gauge_compare_stride;
  o.diffeo_substeps = s.gauge_diffeo_substeps;
  o.minus_generator_sign = s.gauge_minus_sign;
  o.bfield_reference = s.gauge_bfield_reference;
  return o;
}

void run_flow(const Scenario& s, const gkflow::GKState& init, const fs::path& dir, RunOutcome& out,
              gkflow::FlowTrajectory& tr, std::ostream& log) {
  gkflow::FlowProblem p;
  p.system = s.system;
  p.initial = init;
  p.dt = s.dt;
  p.steps = s.steps;
  p.scheme = s.scheme;
  p.cfl_safety = s.cfl_safety;
  p.pluriclosed_side = s.pluriclosed_side;
  p.project_j = s.project_j;
  p.record_stride = s.record_stride;
  p.snapshot_stride = s.snapshot_stride;
  log << "flow " << gkflow::to_string(s.system) << ": " << s.steps << " steps of " << fmt(s.dt) << "\n";
  tr = gkflow::integrate(p);
  {
    auto os = open_out(dir / "trajectory.csv");
    gkflow::write_trajectory_csv(tr, os);
  }
  if (!tr.ok()) {
    out.status = gkflow::to_string(tr.status);
    log << "flow stopped: " << out.status << " at step " << tr.failed_step << ": " << tr.message << "\n";
  }
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    const int step = std::min<int>(static_cast<int>(k) * s.snapshot_stride, s.steps);
    char name[32];
    std::snprintf(name, sizeof name, "step_%06d", step);
    gkflow::save_state(dir / "snapshots" / name, tr.snapshots[k].second, tr.snapshots[k].first,
                       {{"scenario", s.name}, {"step", std::to_string(step)}});
  }
  if (tr.ok())
    gkflow::save_state(dir / "final_state", tr.final_state, tr.final_time,
                       {{"scenario", s.name}, {"step", std::to_string(s.steps)}});
}

void flow_checks(const Scenario& s, const gkflow::FlowTrajectory& tr, CheckList& rows) {
  if (tr.records.empty()) return;
  if (wants(s, "gk_residuals")) {
    double worst = 0.0;
    for (const auto& r : tr.records) worst = std::max(worst, r.residuals.max());
    const double first = tr.records.front().residuals.max();
    const double last = tr.records.back().residuals.max();
    rows.push_back(make_check("gk_residual_max", worst, s.tolerance("gk_residual_max"),
                              "initial " + fmt(first) + " final " + fmt(last)));
  }
  if (wants(s, "structure")) {
    const auto st = gkflow::structure_summary(tr);
    rows.push_back(make_check("dh_max", st.dh, s.tolerance("dh_max")));
    rows.push_back(make_check("j_squared_max", st.jsq, s.tolerance("j_squared_max")));
  }
}

void gauge_checks(const Scenario& s, const gkflow::GKState& init, const fs::path& dir, RunOutcome& out,
                  std::ostream& log) {
  const auto o = gauge_options(s);
  log << "gauge equivalence: " << s.steps << " steps of " << fmt(s.dt) << "\n";
  const auto rep = gkflow::gauge_equivalence_pipeline(init, o);
  {
    auto os = open_out(dir / "gauge.csv");
    os << "t,metric,dc_plus,dc_minus,bfield_metric\n";
    for (const auto& r : rep.rows)
      os << fmt(r.t) << ',' << fmt(r.metric) << ',' << fmt(r.dc_plus) << ',' << fmt(r.dc_minus) << ','
         << fmt(r.bfield_metric) << '\n';
  }
  if (!rep.ok()) {
    out.status = gkflow::to_string(rep.status);
    log << "gauge pipeline stopped: " << out.status << ": " << rep.message << "\n";
    return;
  }
  const std::string diffeo = "min det " + fmt(rep.min_jacobian_det) + " step error " + fmt(rep.max_step_error);
  out.rows.push_back(make_check("gauge_metric", rep.max_metric, s.tolerance("gauge_metric"), diffeo));
  out.rows.push_back(make_check("gauge_dc", rep.max_dc(), s.tolerance("gauge_dc"),
                                "plus " + fmt(rep.max_dc_plus) + " minus " + fmt(rep.max_dc_minus)));
  if (s.gauge_bfield_reference)
    out.rows.push_back(make_check("gauge_bfield_metric", rep.max_bfield_metric, s.tolerance("gauge_bfield_metric")));
}

void transport_checks(const Scenario& s, const gkflow::GKState& init, const fs::path& dir, RunOutcome& out,
                      std::ostream& log) {
  // Forward difference at t* = steps*dt for dt, dt/2, dt/4.
  auto os = open_out(dir / "transport.csv");
  os << "dt,t,residual,rhs_norm\n";
  std::vector<double> res;
  for (int level = 0; level < 3; ++level) {
    auto o = gauge_options(s);
    o.dt = s.dt / (1 << level);
    const int k = s.steps << level;
    o.steps = k + 1;
    log << "transport derivative: dt " << fmt(o.dt) << "\n";
    const auto run = gkflow::run_pluriclosed(init, 1, o, 1);
    if (!run.trajectory.ok()) {
      out.status = gkflow::to_string(run.trajectory.status);
      return;
    }
    const auto phi = gkflow::gauge_diffeo(run, 1.0, o);
    const auto c = gkflow::transport_derivative_check(run, phi, static_cast<std::size_t>(k));
    os << fmt(c.dt) << ',' << fmt(c.t) << ',' << fmt(c.residual) << ',' << fmt(c.rhs_norm) << '\n';
    res.push_back(c.residual);
  }
  const double p1 = std::log2(res[0] / res[1]);
  const double p2 = std::log2(res[1] / res[2]);
  const double dev = std::max(std::abs(p1 - 1.0), std::abs(p2 - 1.0));
  out.rows.push_back(make_check("transport_derivative_order", dev, s.tolerance("transport_derivative_order"),
                                "residuals " + fmt(res[0]) + " " + fmt(res[1]) + " " + fmt(res[2]) + " orders " +
                                    fmt(p1) + " " + fmt(p2)));
}

void static_checks(const Scenario& s, const gkflow::GKState& st, CheckList& rows, std::ostream& log) {
  log << "static analysis at lambda " << fmt(s.static_lambda) << "\n";
  gkflow::SolitonData d{st.g, st.h, {}, s.static_lambda};
  const auto res = gkflow::soliton_residual(d);
  rows.push_back(make_check("soliton_residual", res.max(), s.tolerance("soliton_residual"),
                            "r_g " + fmt(res.r_g) + " r_h " + fmt(res.r_h) + " dH " + fmt(res.dh)));
  const auto prop = gkflow::staticprop_checks(d);
  rows.push_back(make_check("integral_identity_gap", prop.gap, s.tolerance("integral_identity_gap"),
                            "I1 " + fmt(prop.i1) + " I2 " + fmt(prop.i2)));
  rows.push_back(make_check("ricci_lower_bound", std::max(0.0, -prop.min_eig), s.tolerance("ricci_lower_bound"),
                            "min eigenvalue " + fmt(prop.min_eig)));
  if (s.static_lambda == 0.0)
    rows.push_back(make_check("codifferential_h", prop.codiff_h, s.tolerance("codifferential_h")));
  const auto lee = gkflow::lee_form_checks(st.g, st.j_plus, st.h);
  if (lee.star_checked)
    rows.push_back(make_check("lee_theta_minus_star_h", lee.theta_minus_star_h, s.tolerance("lee_theta_minus_star_h"),
                              "|theta| " + fmt(lee.theta_norm)));
  rows.push_back(make_check("lee_d_theta", lee.d_theta, s.tolerance("lee_d_theta")));
  const auto sweep = gkflow::lambda_sweep(d, s.sweep_lo, s.sweep_hi);
  rows.push_back(make_check("lambda_sweep_argmin", std::abs(sweep.lambda_min - s.static_lambda),
                            s.tolerance("lambda_sweep_argmin"),
                            "argmin " + fmt(sweep.lambda_min) + " residual " + fmt(sweep.residual_min) +
                                " least-squares fit " + fmt(gkflow::fit_lambda(d))));
  if (st.h.max_abs() > 0.0) {
    gkflow::SolitonData neg = d;
    neg.lambda = -1.0;
    const auto control = gkflow::staticprop_checks(neg);
    std::string why;
    for (const auto& f : control.failures) why += (why.empty() ? "" : "; ") + f;
    rows.push_back(make_check("negative_lambda_control", control.passed ? 1.0 : 0.0,
                              s.tolerance("negative_lambda_control"),
                              control.passed ? "lambda = -1 accepted" : "lambda = -1 rejected: " + why));
  }
}

void hopf_checks(const Scenario& s, const fs::path& dir, CheckList& rows, std::ostream& log) {
  log << "hopf: " << s.hopf_samples << " samples\n";
  const auto pts = gkflow::hopf_sample_points(static_cast<std::size_t>(s.hopf_samples), s.hopf_seed, s.hopf_r_min,
                                              s.hopf_r_max);
  const auto samples = gkflow::hopf_static_metric(pts);
  const auto cyl = gkflow::hopf_cylinder_invariants();
  double sq = 0, surf = 0, hom = 0, rhs = 0, inv = 0;
  auto os = open_out(dir / "hopf.csv");
  os << "x0,x1,x2,x3,radius,static_residual,surface_identity,homogeneity,pluriclosed_rhs,scal,rc_norm2,rm_norm2\n";
  for (const auto& h : samples) {
    const double r = std::sqrt(h.x[0] * h.x[0] + h.x[1] * h.x[1] + h.x[2] * h.x[2] + h.x[3] * h.x[3]);
    os << fmt(h.x[0]) << ',' << fmt(h.x[1]) << ',' << fmt(h.x[2]) << ',' << fmt(h.x[3]) << ',' << fmt(r) << ','
       << fmt(h.static_residual) << ',' << fmt(h.surface_identity) << ',' << fmt(h.homogeneity) << ','
       << fmt(h.pluriclosed_rhs) << ',' << fmt(h.scal) << ',' << fmt(h.rc_norm2) << ',' << fmt(h.rm_norm2) << '\n';
    sq = std::max(sq, h.static_residual);
    surf = std::max(surf, h.surface_identity);
    hom = std::max(hom, h.homogeneity);
    rhs = std::max(rhs, h.pluriclosed_rhs);
    inv = std::max({inv, std::abs(h.scal - cyl.scal), std::abs(h.rc_norm2 - cyl.rc_norm2),
                    std::abs(h.rm_norm2 - cyl.rm_norm2)});
  }
  rows.push_back(make_check("hopf_s_minus_q", sq, s.tolerance("hopf_s_minus_q")));
  rows.push_back(make_check("hopf_surface_identity", surf, s.tolerance("hopf_surface_identity")));
  rows.push_back(make_check("hopf_pluriclosed_rhs", rhs, s.tolerance("hopf_pluriclosed_rhs")));
  rows.push_back(make_check("hopf_homogeneity", hom, s.tolerance("hopf_homogeneity")));
  rows.push_back(make_check("hopf_invariants", inv, s.tolerance("hopf_invariants"),
                            "cylinder scal " + fmt(cyl.scal) + " |Rc|^2 " + fmt(cyl.rc_norm2) + " |Rm|^2 " +
                                fmt(cyl.rm_norm2)));
}

void identity_checks(const Scenario& s, CheckList& rows, std::ostream& log) {
  log << "identity suite, seed " << s.identities_seed << "\n";
  for (auto r : gkflow::identity_suite(s.identities_seed)) {
    rows.push_back(make_check(r.name, r.value, s.tolerance(r.name), r.detail));
  }
}

void convergence_checks(const Scenario& s, const fs::path& dir, CheckList& rows, std::ostream& log) {
  log << "self-convergence, order " << s.convergence_order << "\n";
  const auto conv = gkflow::self_convergence(s.convergence_order, s.convergence_resolutions);
  auto os = open_out(dir / "convergence.csv");
  os << "operator,n0,n1,n2,difference_01,difference_12,order\n";
  for (const auto& r : conv) {
    os << r.op << ',' << r.resolutions[0] << ',' << r.resolutions[1] << ',' << r.resolutions[2] << ','
       << fmt(r.errors[0]) << ',' << fmt(r.errors[1]) << ',' << fmt(r.order) << '\n';
    const std::string row = "order_" + r.op;
    rows.push_back(make_check(row, std::abs(r.order - s.convergence_order), s.tolerance(row),
                              "observed order " + fmt(r.order)));
  }
}

void write_report(const Scenario& s, const RunOutcome& out, const std::vector<std::string>& header,
                  const fs::path& dir) {
  {
    auto os = open_out(dir / "report.txt");
    for (const auto& h : header) os << h << '\n';
    for (const auto& r : out.rows) {
      os << "check " << r.name << " value " << fmt(r.value) << " tol " << fmt_tol(r.tol) << ' '
         << (r.pass ? "PASS" : "FAIL");
      if (!r.detail.empty()) os << "  " << r.detail;
      os << '\n';
    }
    os << "status " << out.status << '\n';
    os << "result " << out.verdict << '\n';
  }
  auto os = open_out(dir / "report.csv");
  os << "scenario,check,value,tol,pass\n";
  for (const auto& r : out.rows)
    os << s.name << ',' << r.name << ',' << fmt(r.value) << ',' << fmt_tol(r.tol) << ',' << (r.pass ? 1 : 0) << '\n';
}

}  // namespace

void finalize(RunOutcome& out, bool expect_fail) {
  if (out.status != "OK") {
    out.verdict = "DEGENERATE";
    out.exit_code = kExitDegenerate;
    return;
  }
  const bool pass = gkflow::all_pass(out.rows);
  if (expect_fail) {
    out.verdict = pass ? "UNEXPECTED_PASS" : "EXPECTED_FAIL";
    out.exit_code = pass ? kExitCheckFailed : kExitOk;
  } else {
    out.verdict = pass ? "PASS" : "FAIL";
    out.exit_code = pass ? kExitOk : kExitCheckFailed;
  }
}

RunOutcome run_scenario(const Scenario& s, const fs::path& dir, std::ostream& log) {
  fs::create_directories(dir);
  for (const char* stale : {"report.txt", "report.csv", "trajectory.csv", "gauge.csv", "transport.csv", "hopf.csv",
                            "convergence.csv"})
    fs::remove(dir / stale);
  fs::remove_all(dir / "snapshots");
  fs::remove_all(dir / "final_state");

  RunOutcome out;
  std::vector<std::string> header = {"scenario " + s.name, "recipe " + s.recipe,
                                     std::string("expect ") + (s.expect_fail ? "fail" : "pass"),
                                     "threads " + std::to_string(s.threads) + " (sequential evaluation)"};
  const bool global = s.recipe != "HOPF_STATIC";
  gkflow::GKState init;
  if (global) {
    double t0 = 0.0;
    init = initial_state(s, &t0);
    header.push_back("backend " + init.g.backend()->describe());
    if (s.recipe == "CUSTOM") header.push_back("snapshot time " + fmt(t0));
    header.push_back("initial_gk_residual " + fmt(gkflow::gk_residuals(init).max()));
  }
  if (s.has_flow) {
    header.push_back("flow " + gkflow::to_string(s.system) + " scheme " + gkflow::to_string(s.scheme) + " dt " +
                     fmt(s.dt) + " steps " + std::to_string(s.steps));
    gkflow::FlowTrajectory tr;
    run_flow(s, init, dir, out, tr, log);
    if (tr.ok()) header.push_back("final_time " + fmt(tr.final_time));
    flow_checks(s, tr, out.rows);
  }
  if (out.status == "OK" && global && wants(s, "bfield_sign"))
    out.rows.push_back(make_check("bfield_sign_symmetry", gkflow::bfield_sign_symmetry(init.g, init.h),
                                  s.tolerance("bfield_sign_symmetry")));
  if (out.status == "OK" && global && wants(s, "static")) static_checks(s, init, out.rows, log);
  if (out.status == "OK" && global && wants(s, "gauge_equivalence")) gauge_checks(s, init, dir, out, log);
  if (out.status == "OK" && global && wants(s, "transport_derivative")) transport_checks(s, init, dir, out, log);
  if (out.status == "OK" && wants(s, "hopf")) hopf_checks(s, dir, out.rows, log);
  if (out.status == "OK" && wants(s, "identities")) identity_checks(s, out.rows, log);
  if (out.status == "OK" && wants(s, "convergence")) convergence_checks(s, dir, out.rows, log);

  finalize(out, s.expect_fail);
  write_report(s, out, header, dir);
  return out;
}

}  // namespace gkcli
