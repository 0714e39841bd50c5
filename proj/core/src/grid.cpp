#include "gmwb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmwb/errors.hpp"
#include "gmwb/quadrature.hpp"

namespace gmwb {

namespace {
// Width of the sinh clustering region, as a fraction of the premium.
constexpr double kClusterWidth = 0.25;
}  // namespace

std::string_view to_string(ExpectationMethod method) {
  switch (method) {
    case ExpectationMethod::ExactSpline:
      return "exact_spline";
    case ExpectationMethod::GaussHermite:
      return "gauss_hermite";
  }
  return "unknown";
}

ExpectationMethod parse_expectation_method(std::string_view name) {
  if (name == "exact_spline") return ExpectationMethod::ExactSpline;
  if (name == "gauss_hermite") return ExpectationMethod::GaussHermite;
  throw ConfigError("grid.expectation", "expected exact_spline or gauss_hermite, got '" +
                                            std::string(name) + "'");
}

std::string_view to_string(WGridKind kind) {
  switch (kind) {
    case WGridKind::Uniform:
      return "uniform";
    case WGridKind::Clustered:
      return "clustered";
  }
  return "unknown";
}

WGridKind parse_w_grid_kind(std::string_view name) {
  if (name == "uniform") return WGridKind::Uniform;
  if (name == "clustered") return WGridKind::Clustered;
  throw ConfigError("grid.w_kind",
                    "expected uniform or clustered, got '" + std::string(name) + "'");
}

void GridSpec::validate(const ContractSpec& contract) const {
  if (num_w_intervals() < kMinWIntervals) {
    throw ConfigError("grid.w_nodes", "need at least " + std::to_string(kMinWIntervals) +
                                          " intervals, got " +
                                          std::to_string(std::max(0, num_w_intervals())));
  }
  if (w_nodes.front() != 0.0) {
    throw ConfigError("grid.w_nodes", "first node must be 0");
  }
  for (std::size_t i = 1; i < w_nodes.size(); ++i) {
    if (!(w_nodes[i] > w_nodes[i - 1]) || !std::isfinite(w_nodes[i])) {
      throw ConfigError("grid.w_nodes", "nodes must be finite and strictly increasing");
    }
  }
  if (num_a_nodes() < 2) {
    throw ConfigError("grid.a_nodes", "need at least 2 nodes");
  }
  if (a_nodes.front() != 0.0) {
    throw ConfigError("grid.a_nodes", "first node must be 0");
  }
  if (std::abs(a_nodes.back() - contract.premium) > 1e-12 * contract.premium) {
    throw ConfigError("grid.a_nodes", "last node must equal the premium");
  }
  for (std::size_t i = 1; i < a_nodes.size(); ++i) {
    if (!(a_nodes[i] > a_nodes[i - 1])) {
      throw ConfigError("grid.a_nodes", "nodes must be strictly increasing");
    }
  }
  if (quad_order < 1 || quad_order > kMaxGaussHermiteOrder) {
    throw ConfigError("grid.quad_order",
                      "must be in [1, " + std::to_string(kMaxGaussHermiteOrder) + "]");
  }
}

double default_w_max(const ContractSpec& contract, const MarketParams& market) {
  const double r_max = *std::max_element(market.rates.begin(), market.rates.end());
  const double s_max = *std::max_element(market.vols.begin(), market.vols.end());
  const double t = contract.maturity_years;
  return contract.premium * std::exp(r_max * t + 5.0 * s_max * std::sqrt(t));
}

std::vector<double> make_a_nodes(const ContractSpec& contract, int refine) {
  if (refine < 1) throw ConfigError("grid.refine", "must be at least 1");
  const Schedule schedule = contract.schedule();
  const double step = schedule.contractual[1] / refine;
  const double premium = contract.premium;
  const double snap = 1e-9 * premium;

  std::vector<double> nodes;
  for (int i = 0;; ++i) {
    const double a = premium - i * step;
    if (a <= snap) break;
    nodes.push_back(a);
  }
  nodes.push_back(0.0);
  std::reverse(nodes.begin(), nodes.end());
  nodes.back() = premium;
  return nodes;
}

std::vector<double> make_w_nodes(double premium, double w_max, int intervals, WGridKind kind) {
  if (intervals < 1) throw ConfigError("grid.m", "must be positive");
  if (!(w_max > 0.0)) throw ConfigError("grid.w_max", "must be positive");
  std::vector<double> nodes(intervals + 1);
  switch (kind) {
    case WGridKind::Uniform:
      for (int i = 0; i <= intervals; ++i) nodes[i] = w_max * i / intervals;
      break;
    case WGridKind::Clustered: {
      const double width = kClusterWidth * premium;
      const double lo = std::asinh(-premium / width);
      const double hi = std::asinh((w_max - premium) / width);
      for (int i = 0; i <= intervals; ++i) {
        const double xi = lo + (hi - lo) * i / intervals;
        nodes[i] = premium + width * std::sinh(xi);
      }
      break;
    }
  }
  nodes.front() = 0.0;
  nodes.back() = w_max;
  return nodes;
}

GridSpec make_grid(const ContractSpec& contract, const MarketParams& market,
                   const GridOptions& options) {
  if (options.w_intervals < kMinWIntervals) {
    throw ConfigError("grid.m", "must be at least " + std::to_string(kMinWIntervals));
  }
  if (!(options.w_max_scale > 0.0)) {
    throw ConfigError("grid.w_max_scale", "must be positive");
  }
  GridSpec grid;
  const double w_max = options.w_max_scale * default_w_max(contract, market);
  grid.w_nodes = make_w_nodes(contract.premium, w_max, options.w_intervals, options.w_kind);
  grid.a_nodes = make_a_nodes(contract, options.a_refine);
  grid.quad_order = options.quad_order;
  grid.expectation = options.expectation;
  grid.validate(contract);
  return grid;
}

}  // namespace gmwb
