#include "lognormal_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace gmwb::detail {

namespace {

// Probability mass beyond this many standard deviations is below 1e-19.
constexpr double kTailCut = 9.0;

// P(a < Z < b) for standard normal Z, avoiding cancellation in either tail.
double normal_mass(double a, double b) {
  constexpr double r2 = std::numbers::sqrt2;
  if (a >= 0.0) return 0.5 * (std::erfc(a / r2) - std::erfc(b / r2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / r2) - std::erfc(-a / r2));
  return 1.0 - 0.5 * std::erfc(b / r2) - 0.5 * std::erfc(-a / r2);
}

}  // namespace

LognormalSplineKernel::LognormalSplineKernel(std::span<const double> knots, double drift,
                                             double spread, double discount)
    : knots_(knots.begin(), knots.end()),
      drift_(drift),
      spread_(spread),
      discount_(discount),
      n_(knots.size()),
      wy_(n_ * n_, 0.0),
      wm_(n_ * n_, 0.0),
      first_(n_, n_),
      last_(n_, 0) {
  // Zero wealth stays at zero.
  add(0, 0, discount_, 0.0);
  for (std::size_t m = 1; m < n_; ++m) {
    if (spread_ == 0.0) {
      point_row(m, knots_[m] * std::exp(drift_));
    } else {
      diffusion_row(m, knots_[m]);
    }
  }
}

void LognormalSplineKernel::add(std::size_t row, std::size_t col, double wy, double wm) {
  wy_[row * n_ + col] += wy;
  wm_[row * n_ + col] += wm;
  first_[row] = std::min(first_[row], col);
  last_[row] = std::max(last_[row], col);
}

void LognormalSplineKernel::point_row(std::size_t row, double target) {
  const std::size_t top = n_ - 1;
  if (target >= knots_[top]) {
    const double h = knots_[top] - knots_[top - 1];
    const double excess = target - knots_[top];
    add(row, top, discount_ * (1.0 + excess / h), discount_ * 2.0 * h * excess / 6.0);
    add(row, top - 1, -discount_ * excess / h, discount_ * h * excess / 6.0);
    return;
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), target);
  const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
  const std::size_t lo = hi - 1;
  const double h = knots_[hi] - knots_[lo];
  const double b = (target - knots_[lo]) / h;
  const double a = 1.0 - b;
  add(row, lo, discount_ * a, discount_ * (a * a * a - a) * h * h / 6.0);
  add(row, hi, discount_ * b, discount_ * (b * b * b - b) * h * h / 6.0);
}

void LognormalSplineKernel::diffusion_row(std::size_t row, double w) {
  const double s = spread_;
  // Standardised log-distance of level y from the median move.
  auto z_of = [&](double y) {
    if (y <= 0.0) return -std::numeric_limits<double>::infinity();
    return (std::log(y / w) - drift_) / s;
  };
  // E[W'^l] = w^l exp(l drift + l^2 s^2 / 2); the truncated version tilts Z by l s.
  std::array<double, 4> scale{};
  for (int l = 0; l < 4; ++l) {
    scale[l] = std::pow(w, l) * std::exp(l * drift_ + 0.5 * l * l * s * s);
  }

  const std::size_t top = n_ - 1;
  double z_lo = z_of(knots_[0]);
  for (std::size_t i = 0; i < top; ++i) {
    const double z_hi = z_of(knots_[i + 1]);
    const double lo_cut = z_lo;
    z_lo = z_hi;
    if (z_hi < -kTailCut || lo_cut - 3.0 * s > kTailCut) continue;

    const double x = knots_[i];
    const double h = knots_[i + 1] - x;
    std::array<double, 4> pm{};  // E[W'^l ; x_i <= W' < x_{i+1}]
    for (int l = 0; l < 4; ++l) pm[l] = scale[l] * normal_mass(lo_cut - l * s, z_hi - l * s);

    // T_k = E[t^k ; piece] with t = (W' - x) / h
    const double c = -x / h;
    const double ih = 1.0 / h;
    const double t0 = pm[0];
    const double t1 = c * pm[0] + ih * pm[1];
    const double t2 = c * c * pm[0] + 2.0 * c * ih * pm[1] + ih * ih * pm[2];
    const double t3 = c * c * c * pm[0] + 3.0 * c * c * ih * pm[1] + 3.0 * c * ih * ih * pm[2] +
                      ih * ih * ih * pm[3];
    const double curv = h * h / 6.0;
    add(row, i, discount_ * (t0 - t1), discount_ * curv * (-2.0 * t1 + 3.0 * t2 - t3));
    add(row, i + 1, discount_ * t1, discount_ * curv * (t3 - t1));
  }

  // Linear extension beyond the last knot.
  const double z_top = z_of(knots_[top]);
  if (z_top - s <= kTailCut) {
    const double x = knots_[top];
    const double h = x - knots_[top - 1];
    const double p = normal_mass(z_top, std::numeric_limits<double>::infinity());
    const double pm1 = scale[1] * normal_mass(z_top - s, std::numeric_limits<double>::infinity());
    const double excess = pm1 - x * p;  // E[W' - x ; W' >= x]
    add(row, top, discount_ * (p + excess / h), discount_ * 2.0 * h * excess / 6.0);
    add(row, top - 1, -discount_ * excess / h, discount_ * h * excess / 6.0);
  }
}

void LognormalSplineKernel::apply(std::span<const double> values, std::span<const double> second,
                                  std::span<double> out) const {
  for (std::size_t m = 0; m < n_; ++m) {
    double acc = 0.0;
    const double* wy = &wy_[m * n_];
    const double* wm = &wm_[m * n_];
    for (std::size_t i = first_[m]; i <= last_[m] && i < n_; ++i) {
      acc += wy[i] * values[i] + wm[i] * second[i];
    }
    out[m] = acc;
  }
}

}  // namespace gmwb::detail
