#include "cli/run_config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <type_traits>

#include "gmwb/errors.hpp"

namespace gmwb::cli {

using nlohmann::json;

namespace {

// The message of `e` without its "field: " prefix.
std::string bare_message(const ConfigError& e) {
  const std::string what = e.what();
  const std::string prefix = e.field() + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

const json& section(const json& doc, const std::string& path, std::set<std::string> allowed) {
  if (!doc.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& item : doc.items()) {
    if (!allowed.count(item.key())) throw ConfigError(join(path, item.key()), "unknown field");
  }
  return doc;
}

template <typename T>
void read(const json& obj, const std::string& prefix, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string path = join(prefix, key);
  try {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, long>) {
      if (!it->is_number_integer()) throw ConfigError(path, "expected an integer");
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_unsigned() && !(it->is_number_integer() && it->template get<long long>() >= 0)) {
        throw ConfigError(path, "expected a nonnegative integer");
      }
    } else if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw ConfigError(path, "expected a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(path, "expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(path, "expected a string");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!it->is_array()) throw ConfigError(path, "expected an array of numbers");
      for (std::size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_number()) {
          throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
        }
      }
    }
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

template <typename Parse, typename T>
void read_enum(const json& obj, const std::string& prefix, const char* key, Parse parse, T& out) {
  std::string text;
  read(obj, prefix, key, text);
  if (obj.contains(key)) {
    try {
      out = parse(text);
    } catch (const ConfigError& e) {
      // re-root the parser's field name under this section
      throw ConfigError(join(prefix, key), bare_message(e));
    }
  }
}

}  // namespace

MarketParams MarketSection::build(int num_periods) const {
  MarketParams m = MarketParams::flat(rate, vol, num_periods);
  if (!rates.empty()) m.rates = rates;
  if (!vols.empty()) m.vols = vols;
  m.validate(num_periods);
  return m;
}

void RunConfig::validate() const {
  contract.validate();
  if (!std::isfinite(market.rate)) throw ConfigError("market.rate", "must be finite");
  if (!(market.vol >= 0.0) || !std::isfinite(market.vol)) {
    throw ConfigError("market.vol", "must be finite and >= 0");
  }
  market.build(contract.num_withdrawals());
  if (grid.w_intervals < kMinWIntervals) {
    throw ConfigError("grid.m", "must be at least " + std::to_string(kMinWIntervals));
  }
  if (grid.a_refine < 1) throw ConfigError("grid.refine", "must be at least 1");
  if (grid.quad_order < 1 || grid.quad_order > kMaxGaussHermiteOrder) {
    throw ConfigError("grid.quad_order",
                      "must be in [1, " + std::to_string(kMaxGaussHermiteOrder) + "]");
  }
  if (!(grid.w_max_scale > 0.0)) throw ConfigError("grid.w_max_scale", "must be positive");
  solver.validate();
  mc.validate();
  if (curve.g_list.empty()) throw ConfigError("curve.g_list", "must not be empty");
  for (std::size_t i = 0; i < curve.g_list.size(); ++i) {
    const double g = curve.g_list[i];
    if (!(g > 0.0 && g <= 1.0)) {
      throw ConfigError("curve.g_list[" + std::to_string(i) + "]", "must be in (0, 1]");
    }
  }
  if (curve.strategies.empty()) throw ConfigError("curve.strategies", "must not be empty");
  if (threads < 0) throw ConfigError("threads", "must be >= 0");
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  section(doc, "", {"contract", "market", "grid", "strategy", "solver", "mc", "curve", "threads",
                    "output_path", "policy_path"});

  if (doc.contains("contract")) {
    const json& c = section(doc["contract"], "contract",
                            {"premium", "maturity_years", "withdrawals_per_year", "penalty_rate",
                             "surrender_penalty_mode", "annual_fee_bp"});
    read(c, "contract", "premium", cfg.contract.premium);
    read(c, "contract", "maturity_years", cfg.contract.maturity_years);
    read(c, "contract", "withdrawals_per_year", cfg.contract.withdrawals_per_year);
    read(c, "contract", "penalty_rate", cfg.contract.penalty_rate);
    read_enum(c, "contract", "surrender_penalty_mode", parse_surrender_mode,
              cfg.contract.surrender_penalty_mode);
    read(c, "contract", "annual_fee_bp", cfg.contract.annual_fee_bp);
  }
  if (doc.contains("market")) {
    const json& m = section(doc["market"], "market", {"rate", "vol", "rates", "vols"});
    read(m, "market", "rate", cfg.market.rate);
    read(m, "market", "vol", cfg.market.vol);
    read(m, "market", "rates", cfg.market.rates);
    read(m, "market", "vols", cfg.market.vols);
  }
  if (doc.contains("grid")) {
    const json& g = section(doc["grid"], "grid",
                            {"m", "refine", "quad_order", "w_max_scale", "w_kind", "expectation"});
    read(g, "grid", "m", cfg.grid.w_intervals);
    read(g, "grid", "refine", cfg.grid.a_refine);
    read(g, "grid", "quad_order", cfg.grid.quad_order);
    read(g, "grid", "w_max_scale", cfg.grid.w_max_scale);
    read_enum(g, "grid", "w_kind", parse_w_grid_kind, cfg.grid.w_kind);
    read_enum(g, "grid", "expectation", parse_expectation_method, cfg.grid.expectation);
  }
  read_enum(doc, "", "strategy", parse_strategy, cfg.strategy);
  if (doc.contains("solver")) {
    const json& s =
        section(doc["solver"], "solver", {"bracket_lo_bp", "bracket_hi_bp", "tol_bp", "max_iters"});
    read(s, "solver", "bracket_lo_bp", cfg.solver.bracket_lo_bp);
    read(s, "solver", "bracket_hi_bp", cfg.solver.bracket_hi_bp);
    read(s, "solver", "tol_bp", cfg.solver.tol_bp);
    read(s, "solver", "max_iters", cfg.solver.max_iters);
  }
  if (doc.contains("mc")) {
    const json& m = section(doc["mc"], "mc", {"paths", "seed", "antithetic"});
    read(m, "mc", "paths", cfg.mc.paths);
    read(m, "mc", "seed", cfg.mc.seed);
    read(m, "mc", "antithetic", cfg.mc.antithetic);
  }
  if (doc.contains("curve")) {
    const json& c = section(doc["curve"], "curve", {"g_list", "strategies"});
    read(c, "curve", "g_list", cfg.curve.g_list);
    if (c.contains("strategies")) {
      const json& list = c["strategies"];
      if (!list.is_array()) throw ConfigError("curve.strategies", "expected an array of names");
      cfg.curve.strategies.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "curve.strategies[" + std::to_string(i) + "]";
        if (!list[i].is_string()) throw ConfigError(path, "expected a strategy name");
        try {
          cfg.curve.strategies.push_back(parse_strategy(list[i].get<std::string>()));
        } catch (const ConfigError& e) {
          throw ConfigError(path, bare_message(e));
        }
      }
    }
  }
  read(doc, "", "threads", cfg.threads);
  read(doc, "", "output_path", cfg.output_path);
  read(doc, "", "policy_path", cfg.policy_path);
  cfg.mc.threads = cfg.threads;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  json doc;
  doc["contract"] = {
      {"premium", cfg.contract.premium},
      {"maturity_years", cfg.contract.maturity_years},
      {"withdrawals_per_year", cfg.contract.withdrawals_per_year},
      {"penalty_rate", cfg.contract.penalty_rate},
      {"surrender_penalty_mode", std::string(to_string(cfg.contract.surrender_penalty_mode))},
      {"annual_fee_bp", cfg.contract.annual_fee_bp},
  };
  doc["market"] = {{"rate", cfg.market.rate}, {"vol", cfg.market.vol}};
  if (!cfg.market.rates.empty()) doc["market"]["rates"] = cfg.market.rates;
  if (!cfg.market.vols.empty()) doc["market"]["vols"] = cfg.market.vols;
  doc["grid"] = {
      {"m", cfg.grid.w_intervals},
      {"refine", cfg.grid.a_refine},
      {"quad_order", cfg.grid.quad_order},
      {"w_max_scale", cfg.grid.w_max_scale},
      {"w_kind", std::string(to_string(cfg.grid.w_kind))},
      {"expectation", std::string(to_string(cfg.grid.expectation))},
  };
  doc["strategy"] = std::string(to_string(cfg.strategy));
  doc["solver"] = {
      {"bracket_lo_bp", cfg.solver.bracket_lo_bp},
      {"bracket_hi_bp", cfg.solver.bracket_hi_bp},
      {"tol_bp", cfg.solver.tol_bp},
      {"max_iters", cfg.solver.max_iters},
  };
  doc["mc"] = {{"paths", cfg.mc.paths}, {"seed", cfg.mc.seed}, {"antithetic", cfg.mc.antithetic}};
  json strategies = json::array();
  for (StrategyKind k : cfg.curve.strategies) strategies.push_back(std::string(to_string(k)));
  doc["curve"] = {{"g_list", cfg.curve.g_list}, {"strategies", strategies}};
  doc["threads"] = cfg.threads;
  doc["output_path"] = cfg.output_path;
  doc["policy_path"] = cfg.policy_path;
  return doc;
}

}  // namespace gmwb::cli
