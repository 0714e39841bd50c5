#pragma once

#include <functional>

#include "gmwb/contract.hpp"
#include "gmwb/engine.hpp"
#include "gmwb/grid.hpp"

namespace gmwb {

struct FeeSolveConfig {
  double bracket_lo_bp = 0.0;
  double bracket_hi_bp = 1500.0;
  double tol_bp = 0.05;
  int max_iters = 60;

  void validate() const;
};

struct FeeSolveResult {
  double fee_bp = 0.0;
  double price = 0.0;     // price at fee_bp
  double residual = 0.0;  // (price - premium) / premium
  int iterations = 0;
  int evaluations = 0;
  // Price at the lower bracket already equals the premium: the guarantee
  // carries no value and the fee is the lower bracket.
  bool zero_value_guarantee = false;
};

/// Brent root search (inverse quadratic / secant steps safeguarded by
/// bisection) for price_at(fee_bp) == premium on a decreasing price curve.
/// Throws BracketError when the bracket does not straddle the premium and
/// NumericalError when max_iters is exhausted.
FeeSolveResult solve_fee(const std::function<double(double)>& price_at, double premium,
                         const FeeSolveConfig& config = {});

/// Fair fee of `contract` (its annual_fee_bp is ignored) under `strategy`.
FeeSolveResult fair_fee(const ContractSpec& contract, const MarketParams& params,
                        const GridSpec& grid, StrategyKind strategy,
                        const FeeSolveConfig& config = {}, const PriceOptions& options = {});

}  // namespace gmwb
