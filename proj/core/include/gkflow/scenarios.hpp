#pragma once

#include <vector>

#include "gkflow/complex_structure.hpp"
#include "gkflow/static_analysis.hpp"

namespace gkflow {

/// S³×S¹ = SU(2)×U(1) with the bi-invariant product metric (S³ of radius r,
/// |e₄| = 1), J₊ left-invariant (J₊e₄ = e₁, J₊e₂ = e₃), J₋ the same matrix
/// taken right-invariant (stored on the opposite algebra) and H = d^c₊ω₊.
GKState hopf_gk_state(double radius = 1.0);

/// The static datum underlying hopf_gk_state: (g, H), X = 0, λ = 0.
SolitonData hopf_static_datum(double radius = 1.0);

/// Non-Kähler GK torus T⁴ (period 2π) on a {n, m, n, m} grid (m = 4 spectral,
/// order + 1 otherwise):
/// g = (1+εC)(dx0²+dx1²) + (1−εC)(dx2²+dx3²), C = cos(x0+x2),
/// J₊ = J₀, J₋ = J₀ with the (x2, x3) plane reversed, H = d^c₊ω₊.
/// stencil_order 0 selects spectral differentiation.
GKState torus_gk_state(int n, double eps, int stencil_order = 0);

/// Flat T⁴ with g = δ, H = 0, J₊ = J₋ = J₀.
GKState flat_kahler_torus(std::vector<int> resolution, int stencil_order = 4);

/// Kähler torus ω = ω₀ + i∂∂̄φ with φ a random trigonometric potential
/// (`modes` terms, wave vectors in {−1,0,1}⁴, amplitude scaled so that the
/// largest Hessian entry is `amplitude`); H = 0, J₊ = J₋ = J₀.
GKState perturbed_kahler_torus(std::vector<int> resolution, unsigned long long seed, double amplitude,
                               int stencil_order = 0, int modes = 3);

/// Standard complex structure J₀ (J₀e₀ = e₁, J₀e₂ = e₃) on a 4-dimensional backend.
TensorField standard_complex_structure(const BackendPtr& b);

}  // namespace gkflow
