#pragma once

#include <vector>

namespace gmwb {

/// Gauss-Hermite rule for integrals against exp(-x^2):
///   int f(x) exp(-x^2) dx ~= sum_k weights[k] * f(nodes[k]).
/// Nodes are stored in ascending order.
struct GaussHermiteRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxGaussHermiteOrder = 64;

/// Newton iteration on the orthonormal Hermite recurrence. Throws
/// std::invalid_argument unless 1 <= order <= kMaxGaussHermiteOrder.
GaussHermiteRule gauss_hermite(int order);

}  // namespace gmwb
