#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gmwb::oracle {

template <typename F>
double lognormal_expectation(F&& f, double w, double drift, double spread, double disc,
                             const std::vector<double>& breaks) {
  if (w == 0.0) return disc * f(0.0);
  if (spread == 0.0) return disc * f(w * std::exp(drift));
  constexpr double kRange = 12.0;
  constexpr double kMaxWidth = 0.1;
  std::vector<double> cuts{-kRange, kRange};
  for (double b : breaks) {
    if (b <= 0.0) continue;
    const double z = (std::log(b / w) - drift) / spread;
    if (z > -kRange && z < kRange) cuts.push_back(z);
  }
  std::sort(cuts.begin(), cuts.end());

  static thread_local std::vector<double> gl_nodes, gl_weights;
  if (gl_nodes.empty()) gauss_legendre(10, gl_nodes, gl_weights);

  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (hi <= lo) continue;
    const int parts = std::max(1, static_cast<int>(std::ceil((hi - lo) / kMaxWidth)));
    const double width = (hi - lo) / parts;
    for (int p = 0; p < parts; ++p) {
      const double a = lo + p * width;
      const double mid = a + 0.5 * width;
      for (std::size_t k = 0; k < gl_nodes.size(); ++k) {
        const double z = mid + 0.5 * width * gl_nodes[k];
        total += 0.5 * width * gl_weights[k] * norm * std::exp(-0.5 * z * z) *
                 f(w * std::exp(drift + spread * z));
      }
    }
  }
  return disc * total;
}

}  // namespace gmwb::oracle
