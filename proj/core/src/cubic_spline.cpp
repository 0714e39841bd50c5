#include "gmwb/cubic_spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace gmwb {

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 3) {
    throw std::invalid_argument("CubicSpline: at least 3 knots are required");
  }
  if (knots_.size() != values_.size()) {
    throw std::invalid_argument("CubicSpline: knots and values differ in length");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw std::invalid_argument("CubicSpline: knots must be strictly increasing");
    }
  }
  factorise();
  solve();
}

void CubicSpline::refit(std::span<const double> values) {
  if (values.size() != knots_.size()) {
    throw std::invalid_argument("CubicSpline::refit: size mismatch");
  }
  values_.assign(values.begin(), values.end());
  solve();
}

// Interior equations, i = 1..n-2, with M_0 = M_{n-1} = 0:
//   h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1}
//     = 6 ((y_{i+1} - y_i) / h_i - (y_i - y_{i-1}) / h_{i-1})
void CubicSpline::factorise() {
  const std::size_t n = knots_.size();
  const std::size_t m = n - 2;
  diag_.assign(m, 0.0);
  lower_ratio_.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = r + 1;
    const double h_lo = knots_[i] - knots_[i - 1];
    const double h_hi = knots_[i + 1] - knots_[i];
    double d = 2.0 * (h_lo + h_hi);
    if (r > 0) {
      // sub-diagonal entry is h_lo, super-diagonal of the previous row is h_lo too
      lower_ratio_[r] = h_lo / diag_[r - 1];
      d -= lower_ratio_[r] * h_lo;
    }
    diag_[r] = d;
  }
}

void CubicSpline::solve() {
  const std::size_t n = knots_.size();
  const std::size_t m = n - 2;
  second_.assign(n, 0.0);
  std::vector<double> rhs(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = r + 1;
    const double h_lo = knots_[i] - knots_[i - 1];
    const double h_hi = knots_[i + 1] - knots_[i];
    rhs[r] = 6.0 * ((values_[i + 1] - values_[i]) / h_hi - (values_[i] - values_[i - 1]) / h_lo);
    if (r > 0) rhs[r] -= lower_ratio_[r] * rhs[r - 1];
  }
  for (std::size_t r = m; r-- > 0;) {
    const std::size_t i = r + 1;
    double acc = rhs[r];
    if (r + 1 < m) acc -= (knots_[i + 1] - knots_[i]) * second_[i + 1];
    second_[i] = acc / diag_[r];
  }
}

double CubicSpline::left_slope() const {
  const double h = knots_[1] - knots_[0];
  return (values_[1] - values_[0]) / h - h * (2.0 * second_[0] + second_[1]) / 6.0;
}

double CubicSpline::right_slope() const {
  const std::size_t n = knots_.size();
  const double h = knots_[n - 1] - knots_[n - 2];
  return (values_[n - 1] - values_[n - 2]) / h + h * (2.0 * second_[n - 1] + second_[n - 2]) / 6.0;
}

double CubicSpline::operator()(double x) const {
  const std::size_t n = knots_.size();
  if (x <= knots_.front()) {
    return values_.front() + left_slope() * (x - knots_.front());
  }
  if (x >= knots_.back()) {
    return values_.back() + right_slope() * (x - knots_.back());
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - knots_.begin()), n - 1);
  return piece(hi - 1, x);
}

double CubicSpline::operator()(double x, std::size_t& hint) const {
  const std::size_t n = knots_.size();
  if (x <= knots_.front()) {
    hint = 0;
    return values_.front() + left_slope() * (x - knots_.front());
  }
  if (x >= knots_.back()) {
    hint = n - 2;
    return values_.back() + right_slope() * (x - knots_.back());
  }
  std::size_t lo = std::min(hint, n - 2);
  while (lo > 0 && knots_[lo] > x) --lo;
  while (knots_[lo + 1] <= x) ++lo;
  hint = lo;
  return piece(lo, x);
}

double CubicSpline::piece(std::size_t lo, double x) const {
  const std::size_t hi = lo + 1;
  const double h = knots_[hi] - knots_[lo];
  const double a = (knots_[hi] - x) / h;
  const double b = 1.0 - a;
  return a * values_[lo] + b * values_[hi] +
         ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) * (h * h) / 6.0;
}

}  // namespace gmwb
