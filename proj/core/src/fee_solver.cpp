#include "gmwb/fee_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "gmwb/errors.hpp"

namespace gmwb {

namespace {
// |price(lo) - premium| below this fraction of the premium counts as a root
// at the lower bracket.
constexpr double kEdgeTol = 1e-7;
}  // namespace

void FeeSolveConfig::validate() const {
  if (!(bracket_lo_bp >= 0.0)) throw ConfigError("solver.bracket_lo_bp", "must be >= 0");
  if (!(bracket_hi_bp > bracket_lo_bp)) {
    throw ConfigError("solver.bracket_hi_bp", "must exceed solver.bracket_lo_bp");
  }
  if (!(tol_bp > 0.0)) throw ConfigError("solver.tol_bp", "must be positive");
  if (max_iters < 1) throw ConfigError("solver.max_iters", "must be positive");
}

FeeSolveResult solve_fee(const std::function<double(double)>& price_at, double premium,
                         const FeeSolveConfig& config) {
  config.validate();
  FeeSolveResult result;
  auto excess = [&](double fee) {
    ++result.evaluations;
    return price_at(fee) - premium;
  };

  double a = config.bracket_lo_bp;
  double b = config.bracket_hi_bp;
  double fa = excess(a);
  if (std::abs(fa) <= kEdgeTol * premium) {
    result.fee_bp = a;
    result.price = fa + premium;
    result.residual = fa / premium;
    result.zero_value_guarantee = true;
    return result;
  }
  if (fa < 0.0) {
    std::ostringstream msg;
    msg << "price " << fa + premium << " at " << a << " bp is below the premium " << premium
        << ": the guarantee is worthless even at the lower bracket";
    throw BracketError(msg.str());
  }
  double fb = excess(b);
  if (fb > 0.0) {
    std::ostringstream msg;
    msg << "price " << fb + premium << " at " << b << " bp still exceeds the premium " << premium
        << ": raise solver.bracket_hi_bp";
    throw BracketError(msg.str());
  }

  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    result.iterations = iter;
    if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                        0.5 * config.tol_bp;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      result.fee_bp = b;
      result.price = fb + premium;
      result.residual = fb / premium;
      return result;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p = 0.0;
      double q = 0.0;
      if (a == c) {
        p = 2.0 * xm * s;  // secant
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));  // inverse quadratic
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = excess(b);
  }
  throw NumericalError("fair fee search did not converge within " +
                       std::to_string(config.max_iters) + " iterations");
}

FeeSolveResult fair_fee(const ContractSpec& contract, const MarketParams& params,
                        const GridSpec& grid, StrategyKind strategy,
                        const FeeSolveConfig& config, const PriceOptions& options) {
  ContractSpec trial = contract;
  auto price_at = [&](double fee_bp) {
    trial.annual_fee_bp = fee_bp;
    return price(trial, params, grid, strategy, options).price;
  };
  return solve_fee(price_at, contract.premium, config);
}

}  // namespace gmwb
