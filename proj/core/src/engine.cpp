#include "gmwb/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "gmwb/cubic_spline.hpp"
#include "gmwb/errors.hpp"
#include "lognormal_kernel.hpp"
#include "parallel.hpp"

namespace gmwb {

namespace {

constexpr double kMonotoneTol = 1e-9;

std::vector<CubicSpline> build_splines(const ValueSlice& slice, const GridSpec& grid) {
  std::vector<CubicSpline> splines;
  splines.reserve(slice.values.size());
  CubicSpline base(grid.w_nodes, slice.values.front());
  for (const auto& row : slice.values) {
    base.refit(row);
    splines.push_back(base);
  }
  return splines;
}

[[noreturn]] void non_finite(std::string_view where, int n, int j, int m, double value) {
  std::ostringstream msg;
  msg << where << ": non-finite value " << value << " at n=" << n << ", a_index=" << j
      << ", w_index=" << m;
  throw NumericalError(msg.str());
}

// Index k with A_k == A_j - min(G, A_j), or -1 when it is not a grid node.
std::vector<int> contractual_targets(const GridSpec& grid, double contractual, double premium) {
  const auto& a = grid.a_nodes;
  const double tol = 1e-9 * premium;
  std::vector<int> targets(a.size(), -1);
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double dest = a[j] - std::min(contractual, a[j]);
    for (std::size_t k = 0; k <= j; ++k) {
      if (std::abs(a[k] - dest) <= tol) {
        targets[j] = static_cast<int>(k);
        break;
      }
    }
  }
  return targets;
}

long count_monotonicity_violations(const ValueSlice& slice, double premium) {
  long count = 0;
  const double tol = kMonotoneTol * premium;
  for (const auto& row : slice.values) {
    for (std::size_t m = 1; m < row.size(); ++m) {
      if (row[m] < row[m - 1] - tol) ++count;
    }
  }
  return count;
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Static:
      return "static";
    case StrategyKind::Optimal:
      return "optimal";
    case StrategyKind::OptimalWithSurrender:
      return "optimal_surrender";
    case StrategyKind::BangBang:
      return "bang_bang";
    case StrategyKind::StaticWithSurrender:
      return "static_surrender";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  for (auto kind : {StrategyKind::Static, StrategyKind::Optimal,
                    StrategyKind::OptimalWithSurrender, StrategyKind::BangBang,
                    StrategyKind::StaticWithSurrender}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("strategy", "unknown strategy '" + std::string(name) +
                                    "' (expected static, optimal, optimal_surrender, "
                                    "bang_bang or static_surrender)");
}

bool allows_surrender(StrategyKind kind) {
  return kind == StrategyKind::OptimalWithSurrender || kind == StrategyKind::BangBang ||
         kind == StrategyKind::StaticWithSurrender;
}

ValueSlice terminal_slice(const ContractSpec& contract, const GridSpec& grid) {
  const Schedule schedule = contract.schedule();
  const int n = schedule.num_dates();
  const double g_last = schedule.contractual[n];
  ValueSlice slice;
  slice.date = n;
  slice.side = ValueSlice::Side::BeforeWithdrawal;
  slice.values.resize(grid.a_nodes.size());
  for (std::size_t j = 0; j < grid.a_nodes.size(); ++j) {
    auto& row = slice.values[j];
    row.resize(grid.w_nodes.size());
    for (std::size_t m = 0; m < grid.w_nodes.size(); ++m) {
      row[m] = terminal_payoff({grid.w_nodes[m], grid.a_nodes[j]}, g_last, contract.penalty_rate);
    }
  }
  return slice;
}

namespace {

// Precomputed one-period expectation operator; reusable across periods with
// identical (rate, vol, dt).
class PeriodExpectation {
 public:
  PeriodExpectation(int period, const MarketParams& params, const ContractSpec& contract,
                    const Schedule& schedule, const GridSpec& grid, const GaussHermiteRule& rule)
      : method_(grid.expectation) {
    const double dt = schedule.dt(period);
    rate_ = params.rate(period);
    vol_ = params.vol(period);
    dt_ = dt;
    discount_ = std::exp(-rate_ * dt);
    const double drift = (rate_ - contract.fee_rate() - 0.5 * vol_ * vol_) * dt;
    if (method_ == ExpectationMethod::ExactSpline) {
      kernel_.emplace(grid.w_nodes, drift, vol_ * std::sqrt(dt), discount_);
    } else {
      // W' = W * growth[k] at node k; weights absorb the 1/sqrt(pi) normalisation.
      const double spread = vol_ * std::sqrt(2.0 * dt);
      growth_.resize(rule.order);
      weight_.resize(rule.order);
      for (int k = 0; k < rule.order; ++k) {
        growth_[k] = std::exp(drift + spread * rule.nodes[k]);
        weight_[k] = discount_ * rule.weights[k] / std::sqrt(std::numbers::pi);
      }
    }
  }

  bool matches(int period, const MarketParams& params, const Schedule& schedule) const {
    return params.rate(period) == rate_ && params.vol(period) == vol_ && schedule.dt(period) == dt_;
  }

  ValueSlice apply(const ValueSlice& slice, int period, const GridSpec& grid, int threads) const {
    const int num_a = static_cast<int>(slice.values.size());
    const std::size_t num_w = grid.w_nodes.size();
    ValueSlice out;
    out.date = period - 1;
    out.side = ValueSlice::Side::AfterWithdrawal;
    out.values.assign(num_a, std::vector<double>(num_w, 0.0));

    detail::parallel_for(num_a, threads, [&](int j) {
      const CubicSpline spline(grid.w_nodes, slice.values[j]);
      auto& row = out.values[j];
      if (kernel_) {
        kernel_->apply(slice.values[j], spline.second_derivatives(), row);
      } else {
        row[0] = discount_ * slice.values[j][0];
        for (std::size_t m = 1; m < num_w; ++m) {
          const double w = grid.w_nodes[m];
          double acc = 0.0;
          for (std::size_t k = 0; k < growth_.size(); ++k) acc += weight_[k] * spline(w * growth_[k]);
          row[m] = acc;
        }
      }
      for (std::size_t m = 0; m < num_w; ++m) {
        if (!std::isfinite(row[m])) non_finite("expectation_step", period, j, static_cast<int>(m), row[m]);
      }
    });
    return out;
  }

 private:
  ExpectationMethod method_;
  double rate_ = 0.0;
  double vol_ = 0.0;
  double dt_ = 0.0;
  double discount_ = 1.0;
  std::optional<detail::LognormalSplineKernel> kernel_;
  std::vector<double> growth_;
  std::vector<double> weight_;
};

}  // namespace

ValueSlice expectation_step(const ValueSlice& slice, int period, const MarketParams& params,
                            const ContractSpec& contract, const GridSpec& grid,
                            const GaussHermiteRule& rule, int threads) {
  const Schedule schedule = contract.schedule();
  const PeriodExpectation op(period, params, contract, schedule, grid, rule);
  return op.apply(slice, period, grid, threads);
}

ValueSlice jump_step(const ValueSlice& slice, int date, const ContractSpec& contract,
                     const GridSpec& grid, StrategyKind strategy, PolicyMap* policy_out,
                     int threads) {
  const Schedule schedule = contract.schedule();
  const double g = schedule.contractual[date];
  const double beta = contract.penalty_rate;
  const auto& a = grid.a_nodes;
  const auto& w_nodes = grid.w_nodes;
  const int num_a = static_cast<int>(a.size());
  const std::size_t num_w = w_nodes.size();

  std::vector<int> targets;
  if (strategy != StrategyKind::Optimal && strategy != StrategyKind::OptimalWithSurrender) {
    targets = contractual_targets(grid, g, contract.premium);
    for (int j = 0; j < num_a; ++j) {
      if (targets[j] < 0) {
        std::ostringstream msg;
        msg << "contractual withdrawal G_" << date << "=" << g << " from A=" << a[j]
            << " does not land on an A-grid node";
        throw ConfigError("grid.a_nodes", msg.str());
      }
    }
  }

  const std::vector<CubicSpline> splines = build_splines(slice, grid);
  const bool surrender = allows_surrender(strategy);

  ValueSlice out;
  out.date = date;
  out.side = ValueSlice::Side::BeforeWithdrawal;
  out.values.assign(num_a, std::vector<double>(num_w, 0.0));

  detail::parallel_for(num_a, threads, [&](int j) {
    auto& row = out.values[j];
    std::vector<double> best(num_w, -std::numeric_limits<double>::infinity());
    std::vector<Action> chosen(num_w);

    // One k at a time across all of W so spline lookups walk forward.
    // Strict comparison: on ties the first candidate considered wins, so
    // candidates are offered in order of increasing withdrawal.
    auto consider = [&](int k) {
      const double gamma = a[j] - a[k];
      const double cash = withdrawal_cashflow(gamma, g, beta);
      const CubicSpline& spline = splines[k];
      std::size_t hint = 0;
      for (std::size_t m = 0; m < num_w; ++m) {
        const double value = spline(std::max(w_nodes[m] - gamma, 0.0), hint) + cash;
        if (value > best[m]) {
          best[m] = value;
          chosen[m] = {ActionCode::Withdraw, gamma};
        }
      }
    };

    switch (strategy) {
      case StrategyKind::Optimal:
      case StrategyKind::OptimalWithSurrender:
        for (int k = j; k >= 0; --k) consider(k);
        break;
      case StrategyKind::Static:
      case StrategyKind::StaticWithSurrender:
        consider(targets[j]);
        break;
      case StrategyKind::BangBang:
        consider(j);
        if (targets[j] != j) consider(targets[j]);
        break;
    }

    for (std::size_t m = 0; m < num_w; ++m) {
      if (surrender) {
        const double stop =
            surrender_cashflow({w_nodes[m], a[j]}, g, beta, contract.surrender_penalty_mode);
        if (stop > best[m]) {
          best[m] = stop;
          chosen[m] = {ActionCode::Surrender, 0.0};
        }
      }
      if (!std::isfinite(best[m])) non_finite("jump_step", date, j, static_cast<int>(m), best[m]);
      row[m] = best[m];
      if (policy_out != nullptr) policy_out->set(date, j, static_cast<int>(m), chosen[m]);
    }
  });
  return out;
}

PricingResult price(const ContractSpec& contract, const MarketParams& params,
                    const GridSpec& grid, StrategyKind strategy, const PriceOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  contract.validate();
  const Schedule schedule = contract.schedule();
  const int n_dates = schedule.num_dates();
  params.validate(n_dates);
  grid.validate(contract);
  const GaussHermiteRule rule = gauss_hermite(grid.quad_order);

  if (options.policy_out != nullptr) {
    *options.policy_out = PolicyMap(grid.w_nodes, grid.a_nodes, n_dates - 1);
  }

  PricingResult result;
  auto& diag = result.diagnostics;
  diag.w_intervals = grid.num_w_intervals();
  diag.a_nodes = grid.num_a_nodes();
  diag.quad_order = grid.quad_order;
  diag.num_dates = n_dates;
  diag.w_max = grid.w_max();

  ValueSlice slice = terminal_slice(contract, grid);
  std::optional<PeriodExpectation> op;
  diag.monotonicity_violations += count_monotonicity_violations(slice, contract.premium);
  for (int n = n_dates; n >= 1; --n) {
    if (!op || !op->matches(n, params, schedule)) {
      op.emplace(n, params, contract, schedule, grid, rule);
    }
    slice = op->apply(slice, n, grid, options.threads);
    diag.monotonicity_violations += count_monotonicity_violations(slice, contract.premium);
    if (n - 1 >= 1) {
      ValueSlice before =
          jump_step(slice, n - 1, contract, grid, strategy, options.policy_out, options.threads);
      diag.monotonicity_violations += count_monotonicity_violations(before, contract.premium);
      if (options.on_jump) options.on_jump(n - 1, slice, before);
      slice = std::move(before);
    }
  }

  const CubicSpline top(grid.w_nodes, slice.values.back());
  result.price = top(contract.premium);
  result.price_ratio = result.price / contract.premium;
  result.fee_bp = contract.annual_fee_bp;
  if (options.keep_initial_slice) result.initial_slice = std::move(slice);
  diag.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace gmwb
