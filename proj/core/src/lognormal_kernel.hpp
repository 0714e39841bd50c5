#pragma once

#include <span>
#include <vector>

namespace gmwb::detail {

/// Discounted one-period expectation of a natural cubic spline under a
/// lognormal move, as a linear map of the spline's ordinates y and second
/// derivatives M:
///
///   out[m] = disc * E[S(x_m * exp(drift + spread * Z))]
///          = sum_i wy[m][i] * y_i + wm[m][i] * M_i
///
/// Each spline piece (and the linear extension beyond the last knot) is
/// integrated in closed form through lognormal partial moments. The first
/// knot must be 0, which is absorbing.
class LognormalSplineKernel {
 public:
  LognormalSplineKernel(std::span<const double> knots, double drift, double spread,
                        double discount);

  void apply(std::span<const double> values, std::span<const double> second,
             std::span<double> out) const;

  double drift() const { return drift_; }
  double spread() const { return spread_; }
  double discount() const { return discount_; }

 private:
  void add(std::size_t row, std::size_t col, double wy, double wm);
  void point_row(std::size_t row, double target);
  void diffusion_row(std::size_t row, double w);

  std::vector<double> knots_;
  double drift_;
  double spread_;
  double discount_;
  std::size_t n_;
  std::vector<double> wy_;  // row-major n x n
  std::vector<double> wm_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> last_;
};

}  // namespace gmwb::detail
