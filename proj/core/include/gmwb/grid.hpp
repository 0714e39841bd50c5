#pragma once

#include <string_view>
#include <vector>

#include "gmwb/contract.hpp"

namespace gmwb {

/// How the one-period expectation integrates the spline of the value slice.
enum class ExpectationMethod {
  ExactSpline,   // closed-form integral of each spline piece against the lognormal density
  GaussHermite,  // quad_order-point Gauss-Hermite rule on the spline
};

std::string_view to_string(ExpectationMethod method);
ExpectationMethod parse_expectation_method(std::string_view name);

/// Discretisation of the wealth (W) and guarantee (A) state dimensions.
struct GridSpec {
  std::vector<double> w_nodes;  // 0 = W_0 < ... < W_M
  std::vector<double> a_nodes;  // 0 = A_1 < ... < A_J = premium
  int quad_order = 9;
  ExpectationMethod expectation = ExpectationMethod::ExactSpline;

  int num_w_intervals() const { return static_cast<int>(w_nodes.size()) - 1; }
  int num_a_nodes() const { return static_cast<int>(a_nodes.size()); }
  double w_max() const { return w_nodes.back(); }

  /// Structural checks only (node ordering, end points, sizes). Whether the
  /// contractual withdrawal is an A-grid step depends on the strategy and is
  /// checked by the engine.
  void validate(const ContractSpec& contract) const;
};

inline constexpr int kMinWIntervals = 50;

enum class WGridKind {
  Uniform,    // equal spacing on [0, W_max]
  Clustered,  // sinh-stretched, denser around the premium
};

struct GridOptions {
  int w_intervals = 400;    // M
  int a_refine = 2;         // L: A-grid spacing is G / L
  int quad_order = 9;       // q
  double w_max_scale = 1.0; // multiplies the default W_max
  WGridKind w_kind = WGridKind::Clustered;
  ExpectationMethod expectation = ExpectationMethod::ExactSpline;
};

std::string_view to_string(WGridKind kind);
WGridKind parse_w_grid_kind(std::string_view name);

/// premium * exp(max_r * T + 5 * max_sigma * sqrt(T)).
double default_w_max(const ContractSpec& contract, const MarketParams& market);

/// A-grid anchored at the premium with spacing G / refine, stepping down to
/// zero. A trailing remainder smaller than one step gets its own node at 0.
std::vector<double> make_a_nodes(const ContractSpec& contract, int refine);

std::vector<double> make_w_nodes(double premium, double w_max, int intervals, WGridKind kind);

GridSpec make_grid(const ContractSpec& contract, const MarketParams& market,
                   const GridOptions& options = {});

}  // namespace gmwb
