#include "gmwb/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gmwb/errors.hpp"
#include "parallel.hpp"

namespace gmwb {

namespace {

constexpr long kBatchSamples = 2048;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Moments {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const long total = count + other.count;
    const double delta = other.mean - mean;
    mean += delta * other.count / total;
    m2 += other.m2 + delta * delta * (static_cast<double>(count) * other.count / total);
    count = total;
  }
};

struct PathModel {
  const ContractSpec& contract;
  const MarketParams& params;
  Schedule schedule;
  std::vector<double> discount;  // discount[n] = B(0, t_n)
  double fee;

  PathModel(const ContractSpec& c, const MarketParams& p)
      : contract(c), params(p), schedule(c.schedule()), fee(c.fee_rate()) {
    const int n_dates = schedule.num_dates();
    discount.assign(n_dates + 1, 1.0);
    double acc = 0.0;
    for (int n = 1; n <= n_dates; ++n) {
      acc += params.rate(n) * schedule.dt(n);
      discount[n] = std::exp(-acc);
    }
  }

  // Discounted cashflows of one path driven by z[0..N-1] (times `sign`).
  template <typename Decide>
  double value(const std::vector<double>& z, double sign, Decide&& decide) const {
    const int n_dates = schedule.num_dates();
    const double beta = contract.penalty_rate;
    double w = contract.premium;
    double a = contract.premium;
    double total = 0.0;
    for (int n = 1; n <= n_dates; ++n) {
      w = evolve_wealth(w, n, params, schedule, fee, sign * z[n - 1]);
      const double g = schedule.contractual[n];
      if (n == n_dates) {
        total += discount[n] * terminal_payoff({w, a}, g, beta);
        break;
      }
      const Action act = decide(n, w, a);
      if (act.code == ActionCode::Surrender) {
        total += discount[n] *
                 surrender_cashflow({w, a}, g, beta, contract.surrender_penalty_mode);
        break;
      }
      const double gamma = std::clamp(act.amount, 0.0, a);
      total += discount[n] * withdrawal_cashflow(gamma, g, beta);
      w = std::max(w - gamma, 0.0);
      a = std::max(a - gamma, 0.0);
    }
    return total;
  }
};

template <typename Decide>
McEstimate simulate(const ContractSpec& contract, const MarketParams& params,
                    const McConfig& config, Decide decide) {
  contract.validate();
  config.validate();
  const PathModel model(contract, params);
  const int n_dates = model.schedule.num_dates();
  params.validate(n_dates);

  const long samples = config.antithetic ? config.paths / 2 : config.paths;
  const long batches = (samples + kBatchSamples - 1) / kBatchSamples;
  std::vector<Moments> per_batch(batches);

  detail::parallel_for(static_cast<int>(batches), config.threads, [&](int b) {
    std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(b))));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(n_dates);
    const long begin = b * kBatchSamples;
    const long end = std::min(samples, begin + kBatchSamples);
    Moments& acc = per_batch[b];
    for (long s = begin; s < end; ++s) {
      for (double& v : z) v = normal(rng);
      double x = model.value(z, 1.0, decide);
      if (config.antithetic) x = 0.5 * (x + model.value(z, -1.0, decide));
      acc.add(x);
    }
  });

  Moments total;
  for (const Moments& m : per_batch) total.merge(m);
  McEstimate est;
  est.mean = total.mean;
  est.std_error = total.count > 1 ? std::sqrt(total.m2 / (total.count - 1) / total.count) : 0.0;
  est.paths = config.antithetic ? 2 * samples : samples;
  return est;
}

}  // namespace

void McConfig::validate() const {
  if (paths < 1000) throw ConfigError("mc.paths", "must be at least 1000");
  if (threads < 0) throw ConfigError("mc.threads", "must be >= 0");
}

McEstimate mc_price_static(const ContractSpec& contract, const MarketParams& params,
                           const McConfig& config) {
  const Schedule schedule = contract.schedule();
  return simulate(contract, params, config, [&](int n, double, double a) {
    return Action{ActionCode::Withdraw, std::min(schedule.contractual[n], a)};
  });
}

McEstimate mc_price_policy(const ContractSpec& contract, const MarketParams& params,
                           const PolicyMap& policy, const McConfig& config) {
  const int needed = contract.num_withdrawals() - 1;
  if (policy.num_decision_dates() < needed) {
    throw std::runtime_error("policy map covers " + std::to_string(policy.num_decision_dates()) +
                             " decision dates, contract needs " + std::to_string(needed));
  }
  return simulate(contract, params, config,
                  [&](int n, double w, double a) { return policy.lookup(n, w, a); });
}

}  // namespace gmwb
