#include "cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "cli/csv.hpp"
#include "gmwb/errors.hpp"

namespace gmwb::cli {

namespace {

GridSpec grid_for(const RunConfig& cfg, const ContractSpec& contract, const MarketParams& market) {
  return make_grid(contract, market, cfg.grid);
}

PriceOptions price_options(const RunConfig& cfg) {
  PriceOptions o;
  o.threads = cfg.threads;
  return o;
}

void echo_config(const RunConfig& cfg, std::ostream& out) {
  out << "effective config:\n" << to_json(cfg).dump(2) << "\n\n";
}

void line(std::ostream& out, const std::string& key, const std::string& value) {
  out << std::left << std::setw(26) << key << value << '\n';
}

std::string grid_summary(const PricingDiagnostics& d) {
  return "M=" + std::to_string(d.w_intervals) + " J=" + std::to_string(d.a_nodes) +
         " q=" + std::to_string(d.quad_order) + " N=" + std::to_string(d.num_dates) +
         " W_max=" + significant(d.w_max, 6);
}

}  // namespace

std::vector<Table1Cell> table1_cells() {
  struct Row {
    int per_year;
    double vol, optimal, surrender, bang_bang;
  };
  const Row rows[] = {
      {1, 0.2, 129.1, 129.2, 123.9},
      {2, 0.2, 133.7, 134.0, 125.6},
      {1, 0.3, 293.5, 418.4, 392.9},
      {2, 0.3, 302.7, 456.5, 410.7},
  };
  std::vector<Table1Cell> cells;
  for (const Row& r : rows) {
    cells.push_back({r.per_year, r.vol, StrategyKind::Optimal, r.optimal, 2.0});
    cells.push_back({r.per_year, r.vol, StrategyKind::OptimalWithSurrender, r.surrender, 3.0});
    cells.push_back({r.per_year, r.vol, StrategyKind::BangBang, r.bang_bang, 3.0});
  }
  return cells;
}

std::vector<Table1Cell> run_table1(const RunConfig& cfg) {
  std::vector<Table1Cell> cells = table1_cells();
  for (Table1Cell& cell : cells) {
    ContractSpec contract = cfg.contract;
    contract.withdrawals_per_year = cell.withdrawals_per_year;
    const MarketParams market = MarketParams::flat(cfg.market.rate, cell.vol, contract.num_withdrawals());
    const GridSpec grid = grid_for(cfg, contract, market);
    cell.fee_bp = fair_fee(contract, market, grid, cell.strategy, cfg.solver, price_options(cfg)).fee_bp;
  }
  return cells;
}

int cmd_price(const RunConfig& cfg, std::ostream& out) {
  const MarketParams market = cfg.market.build(cfg.contract.num_withdrawals());
  const GridSpec grid = grid_for(cfg, cfg.contract, market);
  PolicyMap policy;
  PriceOptions opts = price_options(cfg);
  if (!cfg.policy_path.empty()) opts.policy_out = &policy;
  const PricingResult r = price(cfg.contract, market, grid, cfg.strategy, opts);

  echo_config(cfg, out);
  line(out, "strategy", std::string(to_string(cfg.strategy)));
  line(out, "fee_bp", fixed(r.fee_bp, 1));
  line(out, "price", significant(r.price, 6));
  line(out, "price/premium", significant(r.price_ratio, 6));
  line(out, "grid", grid_summary(r.diagnostics));
  line(out, "expectation", std::string(to_string(grid.expectation)));
  line(out, "monotonicity_violations", std::to_string(r.diagnostics.monotonicity_violations));
  line(out, "seconds", fixed(r.diagnostics.seconds, 3));

  if (!cfg.policy_path.empty()) {
    std::ofstream file(cfg.policy_path);
    if (!file) throw ConfigError("policy_path", "cannot write '" + cfg.policy_path + "'");
    policy.write(file);
    line(out, "policy", cfg.policy_path);
  }
  if (!cfg.output_path.empty()) {
    CsvWriter csv(cfg.output_path, {"strategy", "fee_bp", "premium", "price", "price_ratio",
                                    "w_intervals", "a_nodes", "quad_order", "num_dates", "w_max",
                                    "monotonicity_violations"});
    const PricingDiagnostics& d = r.diagnostics;
    csv.row({std::string(to_string(cfg.strategy)), fixed(r.fee_bp, 1),
             significant(cfg.contract.premium, 6), significant(r.price, 6),
             significant(r.price_ratio, 6), std::to_string(d.w_intervals),
             std::to_string(d.a_nodes), std::to_string(d.quad_order), std::to_string(d.num_dates),
             significant(d.w_max, 6), std::to_string(d.monotonicity_violations)});
  }
  return kExitOk;
}

int cmd_fairfee(const RunConfig& cfg, std::ostream& out) {
  const MarketParams market = cfg.market.build(cfg.contract.num_withdrawals());
  const GridSpec grid = grid_for(cfg, cfg.contract, market);
  echo_config(cfg, out);
  const FeeSolveResult r =
      fair_fee(cfg.contract, market, grid, cfg.strategy, cfg.solver, price_options(cfg));

  line(out, "strategy", std::string(to_string(cfg.strategy)));
  line(out, "fee_bp", fixed(r.fee_bp, 1));
  line(out, "price", significant(r.price, 6));
  line(out, "residual", significant(r.residual, 3));
  line(out, "iterations", std::to_string(r.iterations));
  line(out, "evaluations", std::to_string(r.evaluations));
  if (r.zero_value_guarantee) {
    out << "zero-value guarantee: the contract is worth the premium at the lower bracket ("
        << fixed(cfg.solver.bracket_lo_bp, 1) << " bp)\n";
  }
  if (!cfg.output_path.empty()) {
    CsvWriter csv(cfg.output_path, {"strategy", "fee_bp", "price", "residual", "iterations",
                                    "evaluations", "zero_value_guarantee"});
    csv.row({std::string(to_string(cfg.strategy)), fixed(r.fee_bp, 1), significant(r.price, 6),
             significant(r.residual, 3), std::to_string(r.iterations),
             std::to_string(r.evaluations), r.zero_value_guarantee ? "1" : "0"});
  }
  return kExitOk;
}

int cmd_curve(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.market.is_flat()) {
    throw ConfigError("market.rates", "curve needs a flat market (maturity varies with g)");
  }
  echo_config(cfg, out);
  std::optional<CsvWriter> csv;
  if (!cfg.output_path.empty()) {
    csv.emplace(cfg.output_path, std::vector<std::string>{"g", "maturity_years",
                                                          "withdrawals_per_year", "strategy",
                                                          "fee_bp", "status", "message"});
  }
  out << std::left << std::setw(10) << "g" << std::setw(22) << "strategy" << "fee_bp\n";
  for (double g : cfg.curve.g_list) {
    ContractSpec contract = cfg.contract;
    contract.maturity_years = 1.0 / g;
    const MarketParams market =
        MarketParams::flat(cfg.market.rate, cfg.market.vol, contract.num_withdrawals());
    const GridSpec grid = grid_for(cfg, contract, market);
    for (StrategyKind kind : cfg.curve.strategies) {
      std::string fee = "nan", status = "ok", message;
      try {
        const FeeSolveResult r =
            fair_fee(contract, market, grid, kind, cfg.solver, price_options(cfg));
        fee = fixed(r.fee_bp, 1);
        if (r.zero_value_guarantee) status = "zero_value_guarantee";
      } catch (const BracketError& e) {
        status = "bracket_error";
        message = e.what();
      } catch (const NumericalError& e) {
        status = "numerical_error";
        message = e.what();
      }
      out << std::setw(10) << significant(g, 6) << std::setw(22) << to_string(kind) << fee;
      if (status != "ok") out << "  (" << status << ")";
      out << '\n';
      if (csv) {
        csv->row({significant(g, 6), significant(contract.maturity_years, 6),
                  std::to_string(contract.withdrawals_per_year), std::string(to_string(kind)),
                  fee, status, message});
      }
    }
  }
  return kExitOk;
}

int cmd_table1(const RunConfig& cfg, std::ostream& out) {
  echo_config(cfg, out);
  const std::vector<Table1Cell> cells = run_table1(cfg);
  out << std::left << std::setw(13) << "frequency" << std::setw(6) << "vol" << std::setw(20)
      << "strategy" << std::setw(10) << "fee_bp" << std::setw(12) << "reference" << "deviation\n";
  double worst = 0.0;
  bool within = true;
  for (const Table1Cell& c : cells) {
    const std::string freq = c.withdrawals_per_year == 1 ? "yearly" : "half-yearly";
    out << std::setw(13) << freq << std::setw(6) << fixed(c.vol, 1) << std::setw(20)
        << to_string(c.strategy) << std::setw(10) << fixed(c.fee_bp, 1) << std::setw(12)
        << fixed(c.reference_bp, 1) << fixed(c.deviation_bp(), 1) << '\n';
    worst = std::max(worst, std::abs(c.deviation_bp()));
    within = within && std::abs(c.deviation_bp()) <= c.tolerance_bp;
  }
  out << "max |deviation| " << fixed(worst, 1) << " bp; "
      << (within ? "all cells within tolerance" : "some cells outside tolerance") << '\n';
  if (!cfg.output_path.empty()) {
    CsvWriter csv(cfg.output_path, {"frequency", "withdrawals_per_year", "vol", "strategy",
                                    "fee_bp", "reference_bp", "deviation_bp"});
    for (const Table1Cell& c : cells) {
      csv.row({c.withdrawals_per_year == 1 ? "yearly" : "half-yearly",
               std::to_string(c.withdrawals_per_year), fixed(c.vol, 2),
               std::string(to_string(c.strategy)), fixed(c.fee_bp, 1), fixed(c.reference_bp, 1),
               fixed(c.deviation_bp(), 1)});
    }
  }
  return kExitOk;
}

int cmd_mc_check(const RunConfig& cfg, std::ostream& out) {
  const MarketParams market = cfg.market.build(cfg.contract.num_withdrawals());
  const GridSpec grid = grid_for(cfg, cfg.contract, market);
  echo_config(cfg, out);

  struct Check {
    std::string name;
    double dp, mean, se;
    bool pass;
  };
  std::vector<Check> checks;
  const double dp_static =
      price(cfg.contract, market, grid, StrategyKind::Static, price_options(cfg)).price;
  const McEstimate mc = mc_price_static(cfg.contract, market, cfg.mc);
  const double slack = 1e-6 * cfg.contract.premium;
  checks.push_back({"static", dp_static, mc.mean, mc.std_error,
                    std::abs(mc.mean - dp_static) <= 3.0 * mc.std_error + slack});

  if (cfg.strategy != StrategyKind::Static) {
    // Replaying the DP's own policy can only do worse than the DP value.
    PolicyMap policy;
    PriceOptions opts = price_options(cfg);
    opts.policy_out = &policy;
    const double dp = price(cfg.contract, market, grid, cfg.strategy, opts).price;
    const McEstimate replay = mc_price_policy(cfg.contract, market, policy, cfg.mc);
    checks.push_back({std::string(to_string(cfg.strategy)) + "_policy", dp, replay.mean,
                      replay.std_error, replay.mean <= dp + 3.0 * replay.std_error + slack});
  }

  bool ok = true;
  std::optional<CsvWriter> csv;
  if (!cfg.output_path.empty()) {
    csv.emplace(cfg.output_path,
                std::vector<std::string>{"check", "dp_price", "mc_mean", "mc_std_error",
                                         "z_score", "paths", "seed", "pass"});
  }
  for (const Check& c : checks) {
    const double z = c.se > 0.0 ? (c.mean - c.dp) / c.se : 0.0;
    line(out, c.name + " dp", significant(c.dp, 6));
    line(out, c.name + " mc", significant(c.mean, 6) + " +/- " + significant(c.se, 3));
    line(out, c.name + " z", fixed(z, 2) + (c.pass ? "  PASS" : "  FAIL"));
    ok = ok && c.pass;
    if (csv) {
      csv->row({c.name, significant(c.dp, 6), significant(c.mean, 6), significant(c.se, 3),
                fixed(z, 2), std::to_string(cfg.mc.paths), std::to_string(cfg.mc.seed),
                c.pass ? "1" : "0"});
    }
  }
  return ok ? kExitOk : kExitNumerical;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GMWB variable annuity pricer", "gmwb"};
  app.require_subcommand(1);

  std::string config_path, config_out;
  std::optional<std::string> strategy, out_path, policy_out;
  std::optional<int> grid_m, grid_refine, quad_order, threads;
  std::optional<std::uint64_t> seed;

  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--strategy", strategy,
                    "static|optimal|optimal_surrender|bang_bang|static_surrender");
    sub->add_option("--out", out_path, "CSV output path");
    sub->add_option("--grid-m", grid_m, "W-grid intervals");
    sub->add_option("--grid-refine", grid_refine, "A-grid nodes per contractual step");
    sub->add_option("--quad-order", quad_order, "Gauss-Hermite order");
    sub->add_option("--seed", seed, "Monte Carlo seed");
    sub->add_option("--threads", threads, "worker threads (0: all cores)");
    sub->add_option("--config-out", config_out, "write the effective config as JSON");
  };
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, std::ostream&);
  };
  const Sub subs[] = {
      {"price", "price the contract at its configured fee", cmd_price},
      {"fairfee", "solve for the fee that prices the contract at par", cmd_fairfee},
      {"curve", "fair fee against the contractual rate g", cmd_curve},
      {"table1", "fair fees of the reference table, with deviations", cmd_table1},
      {"mc-check", "cross-check the static DP price by Monte Carlo", cmd_mc_check},
  };
  std::vector<CLI::App*> handles;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_flags(sub);
    if (std::string(s.name) == "price") {
      sub->add_option("--policy-out", policy_out, "write the chosen actions as a policy map");
    }
    handles.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (strategy) cfg.strategy = parse_strategy(*strategy);
    if (out_path) cfg.output_path = *out_path;
    if (policy_out) cfg.policy_path = *policy_out;
    if (grid_m) cfg.grid.w_intervals = *grid_m;
    if (grid_refine) cfg.grid.a_refine = *grid_refine;
    if (quad_order) cfg.grid.quad_order = *quad_order;
    if (seed) cfg.mc.seed = *seed;
    if (threads) cfg.threads = *threads;
    cfg.mc.threads = cfg.threads;
    cfg.validate();
    if (!config_out.empty()) {
      std::ofstream file(config_out);
      if (!file) throw ConfigError("--config-out", "cannot write '" + config_out + "'");
      file << to_json(cfg).dump(2) << '\n';
    }
    for (std::size_t i = 0; i < handles.size(); ++i) {
      if (handles[i]->parsed()) return subs[i].run(cfg, out);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BracketError& e) {
    err << "bracket error: " << e.what() << '\n';
    return kExitBracket;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace gmwb::cli
