#include "gmwb/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gmwb {

namespace {

struct HermiteEval {
  double value;       // orthonormal h_n(x)
  double derivative;  // h_n'(x)
};

// Orthonormal Hermite polynomials w.r.t. exp(-x^2):
//   h_0 = pi^{-1/4}, h_j = x sqrt(2/j) h_{j-1} - sqrt((j-1)/j) h_{j-2},
//   h_n' = sqrt(2n) h_{n-1}.
HermiteEval hermite(int n, double x) {
  const double h0 = 1.0 / std::pow(std::numbers::pi, 0.25);
  double p1 = h0;
  double p2 = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt(static_cast<double>(j - 1) / j) * p3;
  }
  return {p1, std::sqrt(2.0 * n) * p2};
}

}  // namespace

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1 || order > kMaxGaussHermiteOrder) {
    throw std::invalid_argument("gauss_hermite: order must be in [1, " +
                                std::to_string(kMaxGaussHermiteOrder) + "], got " +
                                std::to_string(order));
  }
  GaussHermiteRule rule;
  rule.order = order;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);

  const int half = (order + 1) / 2;
  double z = 0.0;
  // Roots are found largest first; initial guesses follow the classical
  // asymptotic spacing of Hermite zeros.
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * order + 1.0) - 1.85575 * std::pow(2.0 * order + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(order), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[order - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[order - 2];
    } else {
      z = 2.0 * z - rule.nodes[order - i + 1];
    }

    HermiteEval h{};
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      h = hermite(order, z);
      const double step = h.value / h.derivative;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw std::runtime_error("gauss_hermite: Newton iteration did not converge");
    }
    h = hermite(order, z);
    const double w = 2.0 / (h.derivative * h.derivative);
    rule.nodes[order - 1 - i] = z;
    rule.nodes[i] = -z;
    rule.weights[order - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

}  // namespace gmwb
