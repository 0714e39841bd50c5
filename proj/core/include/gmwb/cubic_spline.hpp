#pragma once

#include <span>
#include <vector>

namespace gmwb {

/// Natural cubic spline through (knots[i], values[i]).
///
/// Second derivatives vanish at both end knots. Outside [knots.front(),
/// knots.back()] the spline continues linearly with the end slope, so
/// affine data is reproduced everywhere.
class CubicSpline {
 public:
  enum class Boundary { Natural };

  CubicSpline() = default;

  /// Throws std::invalid_argument for fewer than 3 knots, a size mismatch
  /// or knots that are not strictly increasing.
  CubicSpline(std::vector<double> knots, std::vector<double> values);

  /// Rebuilds the spline on the same knots with new ordinates, reusing the
  /// factorised tridiagonal system.
  void refit(std::span<const double> values);

  double operator()(double x) const;

  /// Same value as operator(), searching from interval `hint` (updated).
  /// Cheap when successive calls move x monotonically.
  double operator()(double x, std::size_t& hint) const;

  std::span<const double> knots() const { return knots_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> second_derivatives() const { return second_; }
  Boundary boundary() const { return Boundary::Natural; }

  double left_slope() const;
  double right_slope() const;

 private:
  void factorise();
  void solve();
  double piece(std::size_t lo, double x) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> second_;
  // Thomas-algorithm factors for the interior system (size n - 2).
  std::vector<double> diag_;
  std::vector<double> lower_ratio_;
};

}  // namespace gmwb
