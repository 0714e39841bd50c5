#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "gmwb/contract.hpp"
#include "gmwb/grid.hpp"
#include "gmwb/policy_map.hpp"
#include "gmwb/quadrature.hpp"

namespace gmwb {

enum class StrategyKind {
  Static,                // withdraw min(G_n, A) at every date
  Optimal,               // any A-grid withdrawal, no surrender
  OptimalWithSurrender,  // Optimal plus surrender
  BangBang,              // {nothing, G_n, surrender}
  StaticWithSurrender,   // {G_n, surrender}
};

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view name);
bool allows_surrender(StrategyKind kind);

/// Annuity values Q(W_m, A_j) on the grid at one time instant.
struct ValueSlice {
  enum class Side { BeforeWithdrawal, AfterWithdrawal };

  std::vector<std::vector<double>> values;  // values[j][m]
  int date = 0;                             // n in t_n^-/t_n^+
  Side side = Side::BeforeWithdrawal;

  double at(int a_index, int w_index) const { return values[a_index][w_index]; }
};

struct PricingDiagnostics {
  int w_intervals = 0;
  int a_nodes = 0;
  int quad_order = 0;
  int num_dates = 0;
  double w_max = 0.0;
  // Grid points where Q decreased in W by more than 1e-9 * premium, summed
  // over every slice of the backward induction.
  long monotonicity_violations = 0;
  double seconds = 0.0;
};

struct PricingResult {
  double price = 0.0;
  double price_ratio = 0.0;  // price / premium
  double fee_bp = 0.0;
  PricingDiagnostics diagnostics;
  std::optional<ValueSlice> initial_slice;  // t_0^+ values, when requested
};

struct PriceOptions {
  int threads = 0;                  // 0: hardware concurrency
  PolicyMap* policy_out = nullptr;  // filled with the chosen actions when set
  // Called after every jump with the t_n^+ input and t_n^- output slices.
  std::function<void(int date, const ValueSlice& after, const ValueSlice& before)> on_jump;
  bool keep_initial_slice = false;
};

ValueSlice terminal_slice(const ContractSpec& contract, const GridSpec& grid);

/// t_n^- -> t_{n-1}^+ via Gauss-Hermite quadrature over the spline of each
/// A-slice. `period` is n.
ValueSlice expectation_step(const ValueSlice& slice, int period, const MarketParams& params,
                            const ContractSpec& contract, const GridSpec& grid,
                            const GaussHermiteRule& rule, int threads = 0);

/// t_n^+ -> t_n^- by maximising over the strategy's admissible actions.
/// Throws ConfigError if the strategy needs G_n and it is not an A-grid step.
ValueSlice jump_step(const ValueSlice& slice, int date, const ContractSpec& contract,
                     const GridSpec& grid, StrategyKind strategy,
                     PolicyMap* policy_out = nullptr, int threads = 0);

/// Q at (premium, premium) for t = 0.
PricingResult price(const ContractSpec& contract, const MarketParams& params,
                    const GridSpec& grid, StrategyKind strategy,
                    const PriceOptions& options = {});

}  // namespace gmwb
