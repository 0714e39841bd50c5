#pragma once

#include <string>
#include <vector>

#include "gmwb/contract.hpp"
#include "gmwb/engine.hpp"
#include "gmwb/fee_solver.hpp"
#include "gmwb/grid.hpp"
#include "gmwb/mc_oracle.hpp"
#include "json.hpp"

namespace gmwb::cli {

/// Flat rate/vol unless per-period `rates`/`vols` are given.
struct MarketSection {
  double rate = 0.05;
  double vol = 0.2;
  std::vector<double> rates;
  std::vector<double> vols;

  bool is_flat() const { return rates.empty() && vols.empty(); }
  MarketParams build(int num_periods) const;
};

struct CurveSection {
  std::vector<double> g_list{0.05, 0.0625, 0.08, 0.1, 0.125, 0.15, 0.2, 0.25};
  std::vector<StrategyKind> strategies{StrategyKind::Static, StrategyKind::Optimal,
                                       StrategyKind::OptimalWithSurrender,
                                       StrategyKind::BangBang};
};

struct RunConfig {
  ContractSpec contract;
  MarketSection market;
  GridOptions grid;
  StrategyKind strategy = StrategyKind::Optimal;
  FeeSolveConfig solver;
  McConfig mc;
  CurveSection curve;
  int threads = 0;
  std::string output_path;  // CSV; empty for none
  std::string policy_path;  // policy map written by `price`; empty for none

  /// Checks every section that does not depend on the command.
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys and wrong types are
/// ConfigErrors naming the dotted field path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Every field, defaults included.
nlohmann::json to_json(const RunConfig& config);

}  // namespace gmwb::cli
