#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "gmwb/cubic_spline.hpp"
#include "gmwb/engine.hpp"
#include "gmwb/errors.hpp"
#include "gmwb/grid.hpp"
#include "oracles/dp_oracle.hpp"

using namespace gmwb;

namespace {

ContractSpec baseline(int per_year = 1, double maturity = 10.0, double fee_bp = 0.0) {
  ContractSpec c;
  c.premium = 100;
  c.maturity_years = maturity;
  c.withdrawals_per_year = per_year;
  c.penalty_rate = 0.1;
  c.annual_fee_bp = fee_bp;
  return c;
}

GridSpec grid_for(const ContractSpec& c, const MarketParams& m, int intervals = 200, int refine = 2,
                  ExpectationMethod method = ExpectationMethod::ExactSpline, int q = 9) {
  GridOptions o;
  o.w_intervals = intervals;
  o.a_refine = refine;
  o.expectation = method;
  o.quad_order = q;
  return make_grid(c, m, o);
}

ValueSlice fill(const GridSpec& g, double (*f)(double w, double a)) {
  ValueSlice s;
  s.values.resize(g.a_nodes.size());
  for (std::size_t j = 0; j < g.a_nodes.size(); ++j) {
    for (double w : g.w_nodes) s.values[j].push_back(f(w, g.a_nodes[j]));
  }
  return s;
}

constexpr ExpectationMethod kRoutes[] = {ExpectationMethod::ExactSpline,
                                         ExpectationMethod::GaussHermite};

}  // namespace

TEST_CASE("expectation of a linear slice is the fee-discounted wealth") {
  const ContractSpec c = baseline(1, 10.0, 200.0);
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  for (auto route : kRoutes) {
    CAPTURE(to_string(route));
    const GridSpec g = grid_for(c, m, 200, 2, route);
    const ValueSlice in = fill(g, [](double w, double) { return w; });
    const ValueSlice out = expectation_step(in, 1, m, c, g, gauss_hermite(g.quad_order));
    CHECK(out.date == 0);
    CHECK(out.side == ValueSlice::Side::AfterWithdrawal);
    for (std::size_t i = 0; i < g.w_nodes.size(); ++i) {
      const double expected = g.w_nodes[i] * std::exp(-0.02);
      CHECK(out.values[0][i] == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("expectation with zero volatility is a deterministic shift") {
  const ContractSpec c = baseline(1, 10.0, 150.0);
  const MarketParams m = MarketParams::flat(0.04, 0.0, 10);
  for (auto route : kRoutes) {
    const GridSpec g = grid_for(c, m, 120, 2, route);
    const ValueSlice in =
        fill(g, [](double w, double a) { return std::max(w, 0.9 * a) + std::sqrt(w + 1.0); });
    const ValueSlice out = expectation_step(in, 3, m, c, g, gauss_hermite(g.quad_order));
    for (std::size_t j = 0; j < g.a_nodes.size(); j += 5) {
      const CubicSpline s(g.w_nodes, in.values[j]);
      for (std::size_t i = 0; i < g.w_nodes.size(); i += 7) {
        const double expected = std::exp(-0.04) * s(g.w_nodes[i] * std::exp(0.04 - 0.015));
        CHECK(out.values[j][i] == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("expectation of a constant slice is the discounted constant") {
  const ContractSpec c = baseline(2, 10.0, 80.0);
  const MarketParams m = MarketParams::flat(0.05, 0.3, 20);
  for (auto route : kRoutes) {
    const GridSpec g = grid_for(c, m, 150, 2, route);
    const ValueSlice in = fill(g, [](double, double) { return 42.0; });
    const ValueSlice out = expectation_step(in, 5, m, c, g, gauss_hermite(g.quad_order));
    for (const auto& row : out.values) {
      for (double v : row) CHECK(v == doctest::Approx(42.0 * std::exp(-0.025)).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact and Gauss-Hermite routes agree on smooth slices") {
  const ContractSpec c = baseline(2, 10.0, 100.0);
  const MarketParams m = MarketParams::flat(0.05, 0.2, 20);
  GridSpec exact = grid_for(c, m, 400, 2, ExpectationMethod::ExactSpline);
  GridSpec gh = exact;
  gh.expectation = ExpectationMethod::GaussHermite;
  gh.quad_order = 64;
  const ValueSlice in = fill(exact, [](double w, double a) { return w + a * 50.0 / (50.0 + w); });
  const ValueSlice e = expectation_step(in, 1, m, c, exact, gauss_hermite(9));
  const ValueSlice h = expectation_step(in, 1, m, c, gh, gauss_hermite(64));
  for (std::size_t j = 0; j < exact.a_nodes.size(); ++j) {
    for (std::size_t i = 0; i < exact.w_nodes.size(); ++i) {
      if (exact.w_nodes[i] > 2000.0) continue;  // GH nodes reach past W_max there
      CHECK(e.values[j][i] == doctest::Approx(h.values[j][i]).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("exact route matches composite Gauss-Legendre on a kinked slice") {
  const ContractSpec c = baseline(1, 10.0, 120.0);
  const MarketParams m = MarketParams::flat(0.05, 0.3, 10);
  const GridSpec g = grid_for(c, m, 200);
  const ValueSlice in = terminal_slice(c, g);
  const ValueSlice out = expectation_step(in, 10, m, c, g, gauss_hermite(9));
  const double drift = (0.05 - 0.012 - 0.045);
  for (std::size_t j = 0; j < g.a_nodes.size(); j += 4) {
    const CubicSpline s(g.w_nodes, in.values[j]);
    for (std::size_t i = 0; i < g.w_nodes.size(); i += 9) {
      const double ref =
          oracle::lognormal_expectation(s, g.w_nodes[i], drift, 0.3, std::exp(-0.05), g.w_nodes);
      CHECK(out.values[j][i] == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("expectation rejects non-finite values") {
  const ContractSpec c = baseline();
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  const GridSpec g = grid_for(c, m, 100);
  ValueSlice in = terminal_slice(c, g);
  in.values[3][17] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(expectation_step(in, 10, m, c, g, gauss_hermite(9)), NumericalError);
}

TEST_CASE("jump at A = 0 passes values through") {
  const ContractSpec c = baseline();
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  const GridSpec g = grid_for(c, m, 100);
  const ValueSlice after = fill(g, [](double w, double a) { return 0.97 * w + 0.5 * a; });
  for (auto k : {StrategyKind::Static, StrategyKind::Optimal, StrategyKind::BangBang}) {
    const ValueSlice before = jump_step(after, 4, c, g, k);
    CHECK(before.date == 4);
    for (std::size_t i = 0; i < g.w_nodes.size(); ++i) {
      const double w = g.w_nodes[i];
      // only surrender competes with doing nothing
      const double stop = allows_surrender(k) ? w - 0.1 * std::max(w - 10.0, 0.0) : 0.0;
      CHECK(before.values[0][i] ==
            doctest::Approx(std::max(after.values[0][i], stop)).epsilon(1e-14));
    }
  }
}

TEST_CASE("static jump is single-action arithmetic") {
  const ContractSpec c = baseline();  // G = 10
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  GridSpec g = grid_for(c, m, 100, 1);  // A-grid step 10
  // make W = 100 a node
  g.w_nodes = make_w_nodes(100, 1000, 100, WGridKind::Uniform);
  const double d = 0.93;
  const ValueSlice after = fill(g, [](double w, double) { return 0.93 * w; });
  const ValueSlice before = jump_step(after, 2, c, g, StrategyKind::Static);
  REQUIRE(g.a_nodes[1] == doctest::Approx(10.0));
  CHECK(before.values[1][10] == doctest::Approx(90 * d + 10).epsilon(1e-13));
}

TEST_CASE("optimal jump equals explicit action enumeration") {
  // two periods, M = 200, J = 11
  const ContractSpec c = baseline(1, 2.0, 50.0);
  const MarketParams m = MarketParams::flat(0.05, 0.25, 2);
  const GridSpec g = grid_for(c, m, 200, 5);
  REQUIRE(g.a_nodes.size() == 11);
  const ValueSlice after = expectation_step(terminal_slice(c, g), 2, m, c, g, gauss_hermite(9));

  for (auto kind : {StrategyKind::Optimal, StrategyKind::OptimalWithSurrender}) {
    const ValueSlice before = jump_step(after, 1, c, g, kind);
    std::vector<CubicSpline> splines;
    for (const auto& row : after.values) splines.emplace_back(g.w_nodes, row);
    for (std::size_t j = 0; j < g.a_nodes.size(); ++j) {
      for (std::size_t i = 0; i < g.w_nodes.size(); ++i) {
        const double w = g.w_nodes[i];
        double best = -1e300;
        for (std::size_t k = 0; k <= j; ++k) {
          const double gamma = g.a_nodes[j] - g.a_nodes[k];
          const double v = splines[k](std::max(w - gamma, 0.0)) + gamma -
                           0.1 * std::max(gamma - 50.0, 0.0);
          best = std::max(best, v);
        }
        if (kind == StrategyKind::OptimalWithSurrender) {
          const double top = std::max(w, g.a_nodes[j]);
          best = std::max(best, top - 0.1 * std::max(top - 50.0, 0.0));
        }
        CHECK(before.values[j][i] == doctest::Approx(best).epsilon(1e-13).scale(1.0));
      }
    }
  }
}

TEST_CASE("strategies that need G_n reject A-grids without it") {
  const ContractSpec c = baseline();
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  GridSpec g = grid_for(c, m, 100);
  g.a_nodes = {0.0, 33.0, 100.0};
  const ValueSlice after = fill(g, [](double w, double) { return w; });
  CHECK_THROWS_AS(jump_step(after, 1, c, g, StrategyKind::Static), ConfigError);
  CHECK_THROWS_AS(jump_step(after, 1, c, g, StrategyKind::BangBang), ConfigError);
  CHECK_NOTHROW(jump_step(after, 1, c, g, StrategyKind::Optimal));
}

TEST_CASE("grid validation") {
  const ContractSpec c = baseline();
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  GridOptions o;
  o.w_intervals = 40;
  CHECK_THROWS_AS(make_grid(c, m, o), ConfigError);
  GridSpec g = grid_for(c, m, 100);
  g.w_nodes.front() = 1.0;
  CHECK_THROWS_AS(g.validate(c), ConfigError);
  g = grid_for(c, m, 100);
  g.a_nodes = {0.0};
  CHECK_THROWS_AS(g.validate(c), ConfigError);
  g = grid_for(c, m, 100);
  g.a_nodes.back() = 90.0;
  CHECK_THROWS_AS(g.validate(c), ConfigError);

  SUBCASE("default A-grid has J = L N + 1 nodes spaced G / L") {
    const GridSpec d = make_grid(baseline(2), MarketParams::flat(0.05, 0.2, 20));
    CHECK(d.a_nodes.size() == 41);
    CHECK(d.a_nodes[1] == doctest::Approx(2.5));
    CHECK(d.w_nodes.size() == 401);
    CHECK(d.w_max() == doctest::Approx(100 * std::exp(0.5 + 5 * 0.2 * std::sqrt(10.0))));
  }
  SUBCASE("stub A-grid is anchored at the premium") {
    ContractSpec stub = baseline(2, 2.6);
    const auto a = make_a_nodes(stub, 1);
    const double g_step = 100 * 0.5 / 2.6;
    CHECK(a.front() == 0.0);
    CHECK(a.back() == 100.0);
    CHECK(a[a.size() - 2] == doctest::Approx(100 - g_step));
    CHECK(a[1] == doctest::Approx(100 - 5 * g_step));
  }
}

TEST_CASE("J = 2 optimal matches a hand-rolled two-action DP") {
  const ContractSpec c = baseline(1, 3.0, 90.0);
  const MarketParams m = MarketParams::flat(0.05, 0.25, 3);
  GridSpec g = grid_for(c, m, 150);
  g.a_nodes = {0.0, 100.0};
  const double dp = price(c, m, g, StrategyKind::Optimal).price;

  oracle::Setup s{c, m, g.w_nodes, g.a_nodes};
  s.actions = oracle::Actions::AllGridSteps;
  CHECK(dp == doctest::Approx(oracle::brute_force_price(s)).epsilon(1e-9));
}

TEST_CASE("engine matches the brute-force oracle for every strategy") {
  const ContractSpec c = baseline(1, 4.0, 150.0);
  const MarketParams m{{0.05, 0.04, 0.06, 0.05}, {0.2, 0.3, 0.25, 0.15}};
  struct Case {
    StrategyKind kind;
    oracle::Actions actions;
    bool surrender;
  };
  const Case cases[] = {
      {StrategyKind::Static, oracle::Actions::Contractual, false},
      {StrategyKind::Optimal, oracle::Actions::AllGridSteps, false},
      {StrategyKind::OptimalWithSurrender, oracle::Actions::AllGridSteps, true},
      {StrategyKind::BangBang, oracle::Actions::NoneOrContractual, true},
      {StrategyKind::StaticWithSurrender, oracle::Actions::Contractual, true},
  };
  for (auto route : kRoutes) {
    const GridSpec g = grid_for(c, m, 100, 2, route);
    for (const Case& k : cases) {
      CAPTURE(to_string(k.kind));
      CAPTURE(to_string(route));
      oracle::Setup s{c, m, g.w_nodes, g.a_nodes, k.actions, k.surrender};
      s.integrator = route == ExpectationMethod::GaussHermite ? oracle::Integrator::GaussHermite
                                                              : oracle::Integrator::CompositeLegendre;
      s.quad_order = g.quad_order;
      const double dp = price(c, m, g, k.kind).price;
      CHECK(dp == doctest::Approx(oracle::brute_force_price(s)).epsilon(1e-7));
    }
  }
}

TEST_CASE("fine-grid DP converges to the grid-free two-date value") {
  const ContractSpec c = baseline(1, 2.0, 100.0);
  const MarketParams m = MarketParams::flat(0.05, 0.2, 2);
  const GridSpec g = grid_for(c, m, 800, 4);
  for (auto [kind, actions, surrender] :
       {std::tuple{StrategyKind::Optimal, oracle::Actions::AllGridSteps, false},
        std::tuple{StrategyKind::OptimalWithSurrender, oracle::Actions::AllGridSteps, true},
        std::tuple{StrategyKind::Static, oracle::Actions::Contractual, false}}) {
    oracle::Setup s{c, m, g.w_nodes, g.a_nodes, actions, surrender};
    const double semi = oracle::semi_analytic_two_date_price(s);
    CHECK(price(c, m, g, kind).price == doctest::Approx(semi).epsilon(2e-5));
  }
}

TEST_CASE("strategy dominance at equal fee") {
  struct Setup {
    int per_year;
    double maturity, vol, beta, fee;
  };
  for (const Setup& t : {Setup{1, 10, 0.2, 0.1, 100}, Setup{2, 10, 0.3, 0.1, 300},
                         Setup{4, 5, 0.2, 0.05, 50}, Setup{1, 8, 0.25, 0.0, 200}}) {
    ContractSpec c = baseline(t.per_year, t.maturity, t.fee);
    c.penalty_rate = t.beta;
    const MarketParams m = MarketParams::flat(0.05, t.vol, c.num_withdrawals());
    const GridSpec g = grid_for(c, m, 150);
    const double p_static = price(c, m, g, StrategyKind::Static).price;
    const double p_opt = price(c, m, g, StrategyKind::Optimal).price;
    const double p_opts = price(c, m, g, StrategyKind::OptimalWithSurrender).price;
    const double p_bb = price(c, m, g, StrategyKind::BangBang).price;
    const double p_sws = price(c, m, g, StrategyKind::StaticWithSurrender).price;
    const double tol = 1e-12 * c.premium;
    CHECK(p_static <= p_bb + tol);
    CHECK(p_bb <= p_opts + tol);
    CHECK(p_opt <= p_opts + tol);
    CHECK(p_sws <= p_bb + tol);
    CHECK(p_static <= p_sws + tol);
  }
}

TEST_CASE("jump floors: surrender value and every single action") {
  const ContractSpec c = baseline(2, 10.0, 400.0);
  const MarketParams m = MarketParams::flat(0.05, 0.3, 20);
  const GridSpec g = grid_for(c, m, 150);
  const Schedule sched = c.schedule();
  int jumps = 0;
  PriceOptions opts;
  opts.on_jump = [&](int date, const ValueSlice& after, const ValueSlice& before) {
    ++jumps;
    std::vector<CubicSpline> splines;
    for (const auto& row : after.values) splines.emplace_back(g.w_nodes, row);
    const double gn = sched.contractual[date];
    for (std::size_t j = 0; j < g.a_nodes.size(); ++j) {
      for (std::size_t i = 0; i < g.w_nodes.size(); i += 3) {
        const double w = g.w_nodes[i];
        const double q = before.values[j][i];
        CHECK(q >= surrender_cashflow({w, g.a_nodes[j]}, gn, 0.1, c.surrender_penalty_mode) - 1e-12);
        for (std::size_t k = 0; k <= j; ++k) {
          const double gamma = g.a_nodes[j] - g.a_nodes[k];
          CHECK(q >= splines[k](std::max(w - gamma, 0.0)) + withdrawal_cashflow(gamma, gn, 0.1) -
                         1e-12);
        }
      }
    }
  };
  price(c, m, g, StrategyKind::OptimalWithSurrender, opts);
  CHECK(jumps == 19);
}

TEST_CASE("price decreases strictly in the fee") {
  const ContractSpec base = baseline(2);
  const MarketParams m = MarketParams::flat(0.05, 0.2, 20);
  const GridSpec g = grid_for(base, m, 120);
  for (auto kind : {StrategyKind::Static, StrategyKind::Optimal, StrategyKind::OptimalWithSurrender,
                    StrategyKind::BangBang, StrategyKind::StaticWithSurrender}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double fee : {0.0, 250.0, 500.0, 750.0, 1000.0}) {
      ContractSpec c = base;
      c.annual_fee_bp = fee;
      const double p = price(c, m, g, kind).price;
      CHECK(p < prev);
      prev = p;
    }
  }
}

TEST_CASE("zero guarantee slice is the fee-discounted premium") {
  const ContractSpec c = baseline(1, 10.0, 129.1);
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  const GridSpec g = make_grid(c, m);
  PriceOptions opts;
  opts.keep_initial_slice = true;
  const PricingResult r = price(c, m, g, StrategyKind::Optimal, opts);
  REQUIRE(r.initial_slice.has_value());
  const CubicSpline zero_a(g.w_nodes, r.initial_slice->values.front());
  CHECK(zero_a(100.0) == doctest::Approx(100 * std::exp(-0.01291 * 10)).epsilon(1e-3));
}

TEST_CASE("price at the fair fee is the premium") {
  // 129.1 bp is the reference fair fee for this contract (optimal withdrawals)
  const ContractSpec c = baseline(1, 10.0, 129.1);
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  const PricingResult r = price(c, m, make_grid(c, m), StrategyKind::Optimal);
  CHECK(r.price_ratio == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.diagnostics.num_dates == 10);
  CHECK(r.diagnostics.a_nodes == 21);
  CHECK(r.diagnostics.w_intervals == 400);
}

TEST_CASE("results do not depend on the thread count") {
  const ContractSpec c = baseline(2, 10.0, 130.0);
  const MarketParams m = MarketParams::flat(0.05, 0.2, 20);
  const GridSpec g = grid_for(c, m, 100);
  PriceOptions one;
  one.threads = 1;
  PriceOptions four;
  four.threads = 4;
  CHECK(price(c, m, g, StrategyKind::OptimalWithSurrender, one).price ==
        price(c, m, g, StrategyKind::OptimalWithSurrender, four).price);
}

TEST_CASE("exported static policy matches the tabulated static policy") {
  const ContractSpec c = baseline(2, 5.0, 50.0);
  const MarketParams m = MarketParams::flat(0.05, 0.2, 10);
  const GridSpec g = grid_for(c, m, 80 > kMinWIntervals ? 80 : kMinWIntervals);
  PolicyMap exported;
  PriceOptions opts;
  opts.policy_out = &exported;
  price(c, m, g, StrategyKind::Static, opts);
  const PolicyMap expected = PolicyMap::static_policy(c, g);
  REQUIRE(exported.num_decision_dates() == 9);
  for (int n = 1; n <= 9; ++n) {
    for (std::size_t j = 0; j < g.a_nodes.size(); ++j) {
      for (std::size_t i = 0; i < g.w_nodes.size(); ++i) {
        const Action& a = exported.at(n, static_cast<int>(j), static_cast<int>(i));
        CHECK(a.code == ActionCode::Withdraw);
        CHECK(a.amount == doctest::Approx(expected.at(n, j, i).amount).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("strategy names round-trip") {
  for (auto k : {StrategyKind::Static, StrategyKind::Optimal, StrategyKind::OptimalWithSurrender,
                 StrategyKind::BangBang, StrategyKind::StaticWithSurrender}) {
    CHECK(parse_strategy(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_strategy("greedy"), ConfigError);
  CHECK(allows_surrender(StrategyKind::BangBang));
  CHECK_FALSE(allows_surrender(StrategyKind::Optimal));
}
