#pragma once

#include "gkflow/metric.hpp"
#include "gkflow/tensor_field.hpp"

namespace gkflow {

/// Frame derivatives e_a(T) of every component, stored with a new leading
/// covariant slot. Identically zero on the frame backend.
TensorField frame_derivative(const TensorField& t);

/// Contracts slot `slot` of `t` with a point-wise matrix field m (rank 2):
/// out[..i..] = sum_j m[i][j] t[..j..]. The slot variance becomes `variance`.
TensorField contract_slot(const TensorField& t, int slot, const TensorField& m, Index variance);

/// Raises every covariant slot with g^{-1}.
TensorField raise_all(const Metric& g, const TensorField& t);
/// Lowers every contravariant slot with g.
TensorField lower_all(const Metric& g, const TensorField& t);

/// d on k-forms. Components follow the convention
/// (dα)_{a0..ak} = sum_i (-1)^i e_{ai} α_{..^ai..}
///              + sum_{i<j} (-1)^{i+j} c^m_{ai aj} α_{m ..^ai..^aj..}.
TensorField exterior_derivative(const TensorField& alpha);

/// (α∧β) with the determinant normalization (dx^1∧dx^2)_{12} = 1.
TensorField wedge(const TensorField& a, const TensorField& b);

/// (⋆α)_J = (1/k!) sqrt(det g) α^I ε_{IJ}; orientation e_1∧...∧e_n.
TensorField hodge_star(const Metric& g, const TensorField& alpha);

/// Formal L² adjoint of d: d* = (-1)^{n(k+1)+1} ⋆ d ⋆ on k-forms.
TensorField codifferential(const Metric& g, const TensorField& alpha);

/// Hodge Laplacian with the analyst's sign: Δ_d = -(d d* + d* d).
TensorField laplace_beltrami(const Metric& g, const TensorField& alpha);

/// Point-wise form inner product (1/k!) α_I β^I.
TensorField form_inner_pointwise(const Metric& g, const TensorField& a, const TensorField& b);

/// Point-wise full contraction a_{I} b^{I} of two equal-shape tensors
/// (no factorial); slots are raised or lowered as needed.
TensorField tensor_inner_pointwise(const Metric& g, const TensorField& a, const TensorField& b);

/// ∫ f dvol_g by uniform quadrature, summed in point order.
double integrate(const Metric& g, const TensorField& f);

/// ∫ <α, β> dvol_g with the form inner product.
double l2_inner(const Metric& g, const TensorField& a, const TensorField& b);
double l2_norm(const Metric& g, const TensorField& a);

}  // namespace gkflow
