#include "gmwb/contract.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "gmwb/errors.hpp"

namespace gmwb {

namespace {
// Tolerance used to decide whether withdrawals_per_year * maturity is integral.
constexpr double kIntegralTol = 1e-9;
}  // namespace

std::string_view to_string(SurrenderPenaltyMode mode) {
  switch (mode) {
    case SurrenderPenaltyMode::ExcessOnly:
      return "excess_only";
    case SurrenderPenaltyMode::FullAmount:
      return "full_amount";
  }
  return "unknown";
}

SurrenderPenaltyMode parse_surrender_mode(std::string_view name) {
  if (name == "excess_only") return SurrenderPenaltyMode::ExcessOnly;
  if (name == "full_amount") return SurrenderPenaltyMode::FullAmount;
  throw ConfigError("contract.surrender_penalty_mode",
                    "expected excess_only or full_amount, got '" + std::string(name) + "'");
}

int ContractSpec::num_withdrawals() const {
  const double exact = withdrawals_per_year * maturity_years;
  const double rounded = std::round(exact);
  if (std::abs(exact - rounded) < kIntegralTol * std::max(1.0, exact)) {
    return static_cast<int>(rounded);
  }
  return static_cast<int>(std::ceil(exact));
}

Schedule ContractSpec::schedule() const {
  const int n_dates = num_withdrawals();
  const double exact = withdrawals_per_year * maturity_years;
  const bool regular = std::abs(exact - n_dates) < kIntegralTol * std::max(1.0, exact);

  Schedule s;
  s.times.resize(n_dates + 1);
  s.contractual.assign(n_dates + 1, 0.0);
  for (int n = 0; n <= n_dates; ++n) {
    s.times[n] = regular ? maturity_years * n / n_dates
                         : static_cast<double>(n) / withdrawals_per_year;
  }
  s.times[n_dates] = maturity_years;
  for (int n = 1; n <= n_dates; ++n) {
    s.contractual[n] = premium * s.dt(n) / maturity_years;
  }
  return s;
}

void ContractSpec::validate() const {
  if (!(premium > 0.0) || !std::isfinite(premium)) {
    throw ConfigError("contract.premium", "must be a positive finite amount");
  }
  if (!(maturity_years > 0.0) || !std::isfinite(maturity_years)) {
    throw ConfigError("contract.maturity_years", "must be positive");
  }
  if (withdrawals_per_year < 1) {
    throw ConfigError("contract.withdrawals_per_year", "must be at least 1");
  }
  if (!(penalty_rate >= 0.0 && penalty_rate <= 1.0)) {
    throw ConfigError("contract.penalty_rate", "must be in [0, 1]");
  }
  if (!(annual_fee_bp >= 0.0) || !std::isfinite(annual_fee_bp)) {
    throw ConfigError("contract.annual_fee_bp", "must be nonnegative");
  }
}

MarketParams MarketParams::flat(double rate, double vol, int num_periods) {
  return MarketParams{std::vector<double>(num_periods, rate),
                      std::vector<double>(num_periods, vol)};
}

void MarketParams::validate(int num_periods) const {
  if (static_cast<int>(rates.size()) != num_periods) {
    throw ConfigError("market.rates", "expected " + std::to_string(num_periods) +
                                          " entries, got " + std::to_string(rates.size()));
  }
  if (static_cast<int>(vols.size()) != num_periods) {
    throw ConfigError("market.vols", "expected " + std::to_string(num_periods) +
                                         " entries, got " + std::to_string(vols.size()));
  }
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!std::isfinite(rates[i])) {
      throw ConfigError("market.rates[" + std::to_string(i) + "]", "must be finite");
    }
    if (!(vols[i] >= 0.0) || !std::isfinite(vols[i])) {
      throw ConfigError("market.vols[" + std::to_string(i) + "]", "must be finite and >= 0");
    }
  }
}

double withdrawal_cashflow(double gamma, double contractual, double beta) {
  if (gamma < 0.0) throw std::domain_error("withdrawal_cashflow: negative withdrawal");
  if (gamma <= contractual) return gamma;
  return contractual + (1.0 - beta) * (gamma - contractual);
}

double surrender_cashflow(State state, double contractual, double beta,
                          SurrenderPenaltyMode mode) {
  const double amount = std::max(state.wealth, state.guarantee);
  switch (mode) {
    case SurrenderPenaltyMode::ExcessOnly:
      return withdrawal_cashflow(amount, contractual, beta);
    case SurrenderPenaltyMode::FullAmount:
      return (1.0 - beta) * amount;
  }
  return 0.0;
}

double terminal_payoff(State state, double contractual_last, double beta) {
  return std::max(state.wealth, withdrawal_cashflow(state.guarantee, contractual_last, beta));
}

double evolve_wealth(double w_after, double rate, double fee_rate, double vol, double dt,
                     double z) {
  assert(w_after >= 0.0);
  if (w_after == 0.0) return 0.0;
  return w_after * std::exp((rate - fee_rate - 0.5 * vol * vol) * dt + vol * std::sqrt(dt) * z);
}

double evolve_wealth(double w_after, int period, const MarketParams& params,
                     const Schedule& schedule, double fee_rate, double z) {
  return evolve_wealth(w_after, params.rate(period), fee_rate, params.vol(period),
                       schedule.dt(period), z);
}

}  // namespace gmwb
