#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli/run_config.hpp"

namespace gmwb::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitBracket = 4,
};

struct Table1Cell {
  int withdrawals_per_year = 1;
  double vol = 0.0;
  StrategyKind strategy = StrategyKind::Optimal;
  double reference_bp = 0.0;
  double tolerance_bp = 0.0;
  double fee_bp = 0.0;

  double deviation_bp() const { return fee_bp - reference_bp; }
};

/// The twelve reference cells (yearly/half-yearly x vol 0.2/0.3 x
/// optimal, optimal_surrender, bang_bang) with their reference fees.
std::vector<Table1Cell> table1_cells();

/// Solves every cell under `config`'s contract, rate, grid and solver
/// settings; frequency, vol and strategy come from the cell.
std::vector<Table1Cell> run_table1(const RunConfig& config);

int cmd_price(const RunConfig& config, std::ostream& out);
int cmd_fairfee(const RunConfig& config, std::ostream& out);
int cmd_curve(const RunConfig& config, std::ostream& out);
int cmd_table1(const RunConfig& config, std::ostream& out);
int cmd_mc_check(const RunConfig& config, std::ostream& out);

/// Full command line: parses flags, loads and validates the config, runs the
/// subcommand and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gmwb::cli
