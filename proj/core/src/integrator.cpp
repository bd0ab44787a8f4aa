#include "gkflow/integrator.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gkflow/connection.hpp"
#include "gkflow/forms.hpp"

namespace gkflow {

std::string to_string(FlowSystem s) {
  switch (s) {
    case FlowSystem::BField: return "bfield";
    case FlowSystem::Pluriclosed: return "pluriclosed";
    case FlowSystem::GKCoupled: return "gk";
    case FlowSystem::GaugeFixed: return "gauge_fixed";
  }
  return "?";
}

std::string to_string(Scheme s) { return s == Scheme::RK4 ? "rk4" : "euler"; }

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::Ok: return "OK";
    case FlowStatus::Degenerate: return "DEGENERATE";
    case FlowStatus::NonFinite: return "NAN_ABORT";
    case FlowStatus::CflAbort: return "CFL_ABORT";
    case FlowStatus::Invalid: return "INVALID";
  }
  return "?";
}

FlowSystem flow_system_from_string(const std::string& s) {
  if (s == "bfield") return FlowSystem::BField;
  if (s == "pluriclosed") return FlowSystem::Pluriclosed;
  if (s == "gk") return FlowSystem::GKCoupled;
  if (s == "gauge_fixed") return FlowSystem::GaugeFixed;
  throw std::invalid_argument("unknown flow system '" + s + "'");
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "rk4") return Scheme::RK4;
  if (s == "euler") return Scheme::Euler;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

namespace {

const TensorField& side_j(const GKState& s, int side) { return side > 0 ? s.j_plus : s.j_minus; }

TensorField pluriclosed_h(const Metric& g, const TensorField& j, int side) {
  Metric gj = mirror_metric(g, j.backend(), 1e-10);
  TensorField h = d_c(kahler_form(gj, j), j);
  if (side < 0) h *= -1.0;
  return mirror_field(h, g.backend(), 1e-10);
}

GKState advance(const GKState& s, const GKDerivative& d, double a) {
  TensorField g = s.g.tensor();
  g.axpy(a, d.dg);
  TensorField h = s.h;
  if (!d.dh.empty()) h.axpy(a, d.dh);
  TensorField jp = s.j_plus;
  if (!d.dj_plus.empty()) jp.axpy(a, d.dj_plus);
  TensorField jm = s.j_minus;
  if (!d.dj_minus.empty()) jm.axpy(a, d.dj_minus);
  return GKState{Metric(std::move(g)), std::move(h), std::move(jp), std::move(jm)};
}

void accumulate(GKDerivative& acc, const GKDerivative& d, double w) {
  auto add = [w](TensorField& a, const TensorField& b) {
    if (b.empty()) return;
    if (a.empty()) {
      a = b;
      a *= w;
    } else {
      a.axpy(w, b);
    }
  };
  add(acc.dg, d.dg);
  add(acc.dh, d.dh);
  add(acc.dj_plus, d.dj_plus);
  add(acc.dj_minus, d.dj_minus);
}

bool state_finite(const GKState& s) {
  return s.g.tensor().all_finite() && s.h.all_finite() && s.j_plus.all_finite() && s.j_minus.all_finite();
}

}  // namespace

GKDerivative flow_rhs(const FlowProblem& p, const GKState& s) {
  switch (p.system) {
    case FlowSystem::GKCoupled: return gk_coupled_rhs(s);
    case FlowSystem::GaugeFixed: return deturck_gauge_rhs(s, p.gamma0);
    case FlowSystem::BField: {
      BFieldDerivative b = bfield_rhs(s.g, s.h);
      return GKDerivative{std::move(b.dg), std::move(b.dh), TensorField(), TensorField()};
    }
    case FlowSystem::Pluriclosed: {
      const TensorField& j = side_j(s, p.pluriclosed_side);
      Metric gj = mirror_metric(s.g, j.backend(), 1e-10);
      TensorField domega = pluriclosed_rhs(gj, j, p.pluriclosed);
      TensorField dg = metric_rate_from_form_rate(domega, j);
      dg.set_symmetry(Symmetry::Symmetric);
      dg.enforce_symmetry();
      return GKDerivative{mirror_field(dg, s.g.backend(), 1e-10), TensorField(), TensorField(), TensorField()};
    }
  }
  throw std::logic_error("flow_rhs: unknown system");
}

double cfl_bound(const Metric& g, double safety) {
  const Backend& b = *g.backend();
  if (!b.is_torus()) return std::numeric_limits<double>::infinity();
  const TorusChart& chart = b.torus();
  double symbol = 0.0;
  for (int a = 0; a < chart.dim(); ++a) symbol += chart.max_wavenumber(a) * chart.max_wavenumber(a);
  return safety / (g.max_inverse_eigenvalue() * symbol);
}

double default_cfl_safety(Scheme s) { return s == Scheme::RK4 ? 1.0 : 0.5; }

FlowRecord measure(const GKState& s, int step, double t) {
  FlowRecord r;
  r.step = step;
  r.t = t;
  r.residuals = gk_residuals(s);
  r.rc_norm = ricci(s.g).max_abs();
  r.h_norm = s.h.max_abs();
  r.dh_norm = r.residuals.r3;
  r.min_eig = s.g.min_eigenvalue();
  auto xnorm = [&](const TensorField& j) {
    try {
      return gauge_vector_field(mirror_metric(s.g, j.backend(), 1e-10), j).max_abs();
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  r.x_plus_norm = xnorm(s.j_plus);
  r.x_minus_norm = xnorm(s.j_minus);
  return r;
}

FlowTrajectory integrate(const FlowProblem& p) {
  FlowTrajectory tr;
  if (p.dt <= 0.0 || p.steps < 0) {
    tr.status = FlowStatus::Invalid;
    tr.message = "dt must be positive and steps non-negative";
    tr.final_state = p.initial;
    return tr;
  }
  const double safety = p.cfl_safety > 0.0 ? p.cfl_safety : default_cfl_safety(p.scheme);
  const int stride = std::max(1, p.record_stride);

  GKState s = p.initial;
  if (p.system == FlowSystem::Pluriclosed) {
    try {
      s.h = pluriclosed_h(s.g, side_j(s, p.pluriclosed_side), p.pluriclosed_side);
    } catch (const std::exception& e) {
      tr.status = FlowStatus::Invalid;
      tr.message = e.what();
      tr.final_state = s;
      return tr;
    }
  }
  double t = 0.0;
  tr.records.push_back(measure(s, 0, t));
  if (p.snapshot_stride > 0) tr.snapshots.emplace_back(t, s);
  if (p.observer) p.observer(0, t, s);

  for (int step = 1; step <= p.steps; ++step) {
    int halvings = 0;
    try {
      const double bound = cfl_bound(s.g, safety);
      while (p.dt / std::ldexp(1.0, halvings) > bound) {
        if (++halvings > 8) {
          std::ostringstream os;
          os << "step " << step << ": dt=" << p.dt << " exceeds the stability bound " << bound
             << " even after 8 halvings";
          tr.status = FlowStatus::CflAbort;
          tr.failed_step = step;
          tr.message = os.str();
          break;
        }
      }
      if (tr.status != FlowStatus::Ok) break;
      const int sub = 1 << halvings;
      const double h = p.dt / sub;
      for (int k = 0; k < sub; ++k) {
        GKDerivative k1 = flow_rhs(p, s);
        if (p.scheme == Scheme::Euler) {
          s = advance(s, k1, h);
        } else {
          GKDerivative k2 = flow_rhs(p, advance(s, k1, 0.5 * h));
          GKDerivative k3 = flow_rhs(p, advance(s, k2, 0.5 * h));
          GKDerivative k4 = flow_rhs(p, advance(s, k3, h));
          GKDerivative sum;
          accumulate(sum, k1, 1.0 / 6.0);
          accumulate(sum, k2, 2.0 / 6.0);
          accumulate(sum, k3, 2.0 / 6.0);
          accumulate(sum, k4, 1.0 / 6.0);
          s = advance(s, sum, h);
        }
      }
      if (!state_finite(s)) {
        tr.status = FlowStatus::NonFinite;
        tr.failed_step = step;
        tr.message = "non-finite values at step " + std::to_string(step);
        break;
      }
      double proj = 0.0;
      if (p.project_j) {
        proj = std::max(project_complex_structure(s.j_plus), project_complex_structure(s.j_minus));
      }
      if (p.system == FlowSystem::Pluriclosed)
        s.h = pluriclosed_h(s.g, side_j(s, p.pluriclosed_side), p.pluriclosed_side);
      t = step * p.dt;
      tr.max_projection = std::max(tr.max_projection, proj);
      tr.max_cfl_halvings = std::max(tr.max_cfl_halvings, halvings);
      if (step % stride == 0 || step == p.steps) {
        FlowRecord r = measure(s, step, t);
        r.projection = proj;
        r.cfl_halvings = halvings;
        tr.records.push_back(r);
      }
      if (p.snapshot_stride > 0 && (step % p.snapshot_stride == 0 || step == p.steps))
        tr.snapshots.emplace_back(t, s);
      if (p.observer) p.observer(step, t, s);
    } catch (const DegenerateMetricError& e) {
      tr.status = FlowStatus::Degenerate;
      tr.failed_step = step;
      tr.message = e.what();
      break;
    } catch (const IncompatibleStructureError& e) {
      tr.status = FlowStatus::Invalid;
      tr.failed_step = step;
      tr.message = e.what();
      break;
    }
  }
  tr.final_state = s;
  tr.final_time = t;
  return tr;
}

const std::vector<std::string>& trajectory_csv_columns() {
  static const std::vector<std::string> cols = {
      "t",         "rc_norm",     "h_norm",       "dh_norm",   "nij_plus",    "nij_minus",    "r1",
      "r2",        "r3",          "compat_plus",  "compat_minus", "min_eig_g", "x_plus_norm", "x_minus_norm"};
  return cols;
}

void write_trajectory_csv(const FlowTrajectory& tr, std::ostream& os) {
  const auto& cols = trajectory_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  os << std::setprecision(17);
  for (const FlowRecord& r : tr.records) {
    const GKResiduals& q = r.residuals;
    const double v[] = {r.t,  r.rc_norm, r.h_norm,        r.dh_norm,        q.nij_plus, q.nij_minus,    q.r1,
                        q.r2, q.r3,      q.compat_plus,   q.compat_minus,   r.min_eig,  r.x_plus_norm, r.x_minus_norm};
    for (std::size_t i = 0; i < std::size(v); ++i) os << (i ? "," : "") << v[i];
    os << '\n';
  }
}

}  // namespace gkflow
