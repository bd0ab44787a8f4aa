#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "gkflow/backend.hpp"
#include "gkflow/tensor_field.hpp"

namespace testutil {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline gkflow::BackendPtr torus(std::vector<int> res, int order = 0) {
  std::vector<double> periods(res.size(), kTwoPi);
  return gkflow::make_torus(std::move(res), std::move(periods), order);
}

/// Scalar field from a function of the coordinates.
inline gkflow::TensorField scalar(const gkflow::BackendPtr& b, const std::function<double(const std::vector<double>&)>& f) {
  auto s = gkflow::TensorField::scalar(b);
  for (std::size_t p = 0; p < b->num_points(); ++p) s(p, 0) = f(b->torus().coordinates(p));
  return s;
}

/// k-form with one independent component set to v at every point
/// (antisymmetric completion, full storage).
inline void set_form_component(gkflow::TensorField& a, std::size_t p, std::vector<int> idx, double v) {
  for (const auto& perm : gkflow::permutations(static_cast<int>(idx.size()))) {
    std::vector<int> j(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) j[i] = idx[perm.map[i]];
    a(p, a.flat(std::span<const int>(j))) = perm.sign * v;
  }
}

}  // namespace testutil
