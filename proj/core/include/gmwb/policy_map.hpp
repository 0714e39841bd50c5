#pragma once

#include <iosfwd>
#include <vector>

#include "gmwb/contract.hpp"
#include "gmwb/grid.hpp"

namespace gmwb {

enum class ActionCode : int {
  Withdraw = 0,
  Surrender = 1,
};

struct Action {
  ActionCode code = ActionCode::Withdraw;
  double amount = 0.0;  // withdrawal gamma; ignored for Surrender
};

/// Tabulated decision at every withdrawal date 1..N-1 and every (W, A) grid
/// node. Produced by the engine, consumed by the Monte Carlo policy pricer.
///
/// Text exchange format (one row per date x W-node x A-node):
///
///     # gmwb-policy v1
///     dates,<N-1>
///     w_nodes,<M+1>
///     a_nodes,<J>
///     date,w_index,a_index,w,a,action,amount
///     1,0,0,0,0,0,0
///     ...
///
/// `action` is 0 for withdraw and 1 for surrender. Numbers are written with
/// 17 significant digits so a round trip is exact.
class PolicyMap {
 public:
  PolicyMap() = default;
  PolicyMap(std::vector<double> w_nodes, std::vector<double> a_nodes, int num_decision_dates);

  /// Always withdraws min(G_n, A_j); never surrenders.
  static PolicyMap static_policy(const ContractSpec& contract, const GridSpec& grid);

  int num_decision_dates() const { return num_dates_; }
  const std::vector<double>& w_nodes() const { return w_nodes_; }
  const std::vector<double>& a_nodes() const { return a_nodes_; }

  void set(int date, int a_index, int w_index, Action action);
  const Action& at(int date, int a_index, int w_index) const;

  /// Nearest A-node; in W, linear interpolation of the withdrawal amount
  /// when both neighbouring nodes withdraw, otherwise the nearer node's
  /// action. The amount is capped at `guarantee`.
  Action lookup(int date, double wealth, double guarantee) const;

  void write(std::ostream& out) const;

  /// Throws std::runtime_error on malformed input or missing rows.
  static PolicyMap read(std::istream& in);

 private:
  std::size_t index(int date, int a_index, int w_index) const;

  std::vector<double> w_nodes_;
  std::vector<double> a_nodes_;
  int num_dates_ = 0;
  std::vector<Action> actions_;
  std::vector<unsigned char> filled_;
};

}  // namespace gmwb
