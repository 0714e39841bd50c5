#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gmwb {

enum class SurrenderPenaltyMode {
  ExcessOnly,  // penalty only on the part of max(W, A) above the contractual amount
  FullAmount,  // penalty on the whole surrender amount
};

std::string_view to_string(SurrenderPenaltyMode mode);
SurrenderPenaltyMode parse_surrender_mode(std::string_view name);

/// Withdrawal dates t_0 = 0 < t_1 < ... < t_N = T and the contractual
/// amount due at each of them. Index 0 of `contractual` is unused.
struct Schedule {
  std::vector<double> times;        // size N + 1
  std::vector<double> contractual;  // size N + 1, contractual[n] = G_n

  int num_dates() const { return static_cast<int>(times.size()) - 1; }
  double dt(int n) const { return times[n] - times[n - 1]; }
};

struct ContractSpec {
  double premium = 100.0;
  double maturity_years = 10.0;
  int withdrawals_per_year = 1;
  double penalty_rate = 0.1;
  SurrenderPenaltyMode surrender_penalty_mode = SurrenderPenaltyMode::ExcessOnly;
  double annual_fee_bp = 0.0;

  /// N = ceil(withdrawals_per_year * maturity_years).
  int num_withdrawals() const;

  /// Regular dates every 1/withdrawals_per_year years; a trailing stub
  /// period absorbs any remainder so that t_N = maturity_years.
  Schedule schedule() const;

  double fee_rate() const { return annual_fee_bp * 1e-4; }
  double contractual_rate() const { return 1.0 / maturity_years; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Piecewise-constant market data; entry n - 1 applies to (t_{n-1}, t_n].
struct MarketParams {
  std::vector<double> rates;
  std::vector<double> vols;

  static MarketParams flat(double rate, double vol, int num_periods);

  double rate(int period) const { return rates[period - 1]; }
  double vol(int period) const { return vols[period - 1]; }

  void validate(int num_periods) const;
};

struct State {
  double wealth = 0.0;
  double guarantee = 0.0;
};

/// Cash received for withdrawing `gamma`; the part above `contractual`
/// is reduced by the penalty fraction `beta`.
double withdrawal_cashflow(double gamma, double contractual, double beta);

double surrender_cashflow(State state, double contractual, double beta,
                          SurrenderPenaltyMode mode);

/// max(W, C_N(A)) at maturity.
double terminal_payoff(State state, double contractual_last, double beta);

/// One-period lognormal transition of the wealth account net of fees.
/// Zero wealth is absorbing.
double evolve_wealth(double w_after, double rate, double fee_rate, double vol,
                     double dt, double z);

double evolve_wealth(double w_after, int period, const MarketParams& params,
                     const Schedule& schedule, double fee_rate, double z);

}  // namespace gmwb
