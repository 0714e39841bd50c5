#pragma once

#include <cstdint>

#include "gmwb/contract.hpp"
#include "gmwb/policy_map.hpp"

namespace gmwb {

struct McConfig {
  long paths = 200000;
  std::uint64_t seed = 20150731;
  bool antithetic = true;
  int threads = 0;  // 0: hardware concurrency; results do not depend on it

  void validate() const;  // paths >= 1000
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long paths = 0;
};

/// Static withdrawals min(G_n, A) along exact lognormal paths; discounted
/// withdrawal cashflows plus the discounted terminal payoff.
McEstimate mc_price_static(const ContractSpec& contract, const MarketParams& params,
                           const McConfig& config = {});

/// Same simulation, applying the tabulated action at each decision date.
/// Any such policy is admissible, so the estimate is a lower bound for the
/// optimal value up to sampling error.
McEstimate mc_price_policy(const ContractSpec& contract, const MarketParams& params,
                           const PolicyMap& policy, const McConfig& config = {});

}  // namespace gmwb
