#pragma once

#include <random>
#include <string>
#include <vector>

#include "gkflow/integrator.hpp"
#include "gkflow/metric.hpp"
#include "gkflow/tensor_field.hpp"

namespace gkflow {

/// One named residual against its tolerance.
struct CheckRow {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string detail;
};
using CheckList = std::vector<CheckRow>;

/// pass = value finite and value <= tol.
CheckRow make_check(std::string name, double value, double tol, std::string detail = {});
bool all_pass(const CheckList& rows);

/// Smooth trigonometric field: every component is Σ a cos(k·x + p) over
/// `modes` random wave vectors k ∈ {−1,0,1}ⁿ, with |a| ≤ amplitude. The
/// declared symmetry is enforced afterwards.
TensorField random_smooth_field(const BackendPtr& b, std::vector<Index> slots, Symmetry sym, std::mt19937_64& rng,
                                double amplitude, int modes = 3);
/// δ + random symmetric perturbation.
Metric random_smooth_metric(const BackendPtr& b, std::mt19937_64& rng, double amplitude);
/// A J₀ A⁻¹ with A = Id + random perturbation (generally not integrable).
TensorField random_complex_structure(const BackendPtr& b, std::mt19937_64& rng, double amplitude);

struct IdentitySuiteOptions {
  std::vector<int> resolution{32, 8, 8, 8};
  int stencil_order = 4;
  double amplitude = 0.1;
};

/// Algebraic identities on randomized smooth inputs: first Bianchi, Riemann
/// antisymmetry, d² = 0, Dg = 0, Ricci symmetry, Nijenhuis (coordinate vs
/// bracket, torus and group), Lie derivative vs transport (first order in ε),
/// ⋆⋆ = 1 on 2-forms, (d, d*) adjointness, H² ≥ 0, flat torus as torus and
/// as abelian group.
CheckList identity_suite(unsigned long long seed, const IdentitySuiteOptions& opt = {});

/// Richardson self-convergence of d, d*, Δ_d and Rm on smooth data over a
/// conformally flat metric on T⁴ (variation along x0 and x1):
/// p = log2(|u_N − u_2N| / |u_2N − u_4N|) at the coarse nodes.
struct ConvergenceRow {
  std::string op;
  std::vector<int> resolutions;
  std::vector<double> errors;
  double order = 0.0;
};
std::vector<ConvergenceRow> self_convergence(int stencil_order, const std::vector<int>& resolutions);

/// max |bfield_rhs(g, −H) − (dg, −dh)|, exact by construction.
double bfield_sign_symmetry(const Metric& g, const TensorField& h);

/// Largest ‖dH‖ and ‖J² + Id‖ over the records of a trajectory.
struct StructureSummary {
  double dh = 0.0;
  double jsq = 0.0;
};
StructureSummary structure_summary(const FlowTrajectory& tr);

}  // namespace gkflow
