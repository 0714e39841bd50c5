#include "gmwb/policy_map.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gmwb {

namespace {

constexpr std::string_view kMagic = "# gmwb-policy v1";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double v = 0.0;
  if (!(in >> v)) throw std::runtime_error("policy map: bad number '" + text + "'");
  return v;
}

long parse_long(const std::string& text) {
  std::size_t used = 0;
  const long v = std::stol(text, &used);
  if (used != text.size()) throw std::runtime_error("policy map: bad integer '" + text + "'");
  return v;
}

int expect_header(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("policy map: truncated header");
  const auto fields = split_csv(line);
  if (fields.size() != 2 || fields[0] != key) {
    throw std::runtime_error("policy map: expected '" + std::string(key) + ",<n>'");
  }
  return static_cast<int>(parse_long(fields[1]));
}

}  // namespace

PolicyMap::PolicyMap(std::vector<double> w_nodes, std::vector<double> a_nodes,
                     int num_decision_dates)
    : w_nodes_(std::move(w_nodes)),
      a_nodes_(std::move(a_nodes)),
      num_dates_(std::max(0, num_decision_dates)) {
  const std::size_t size = static_cast<std::size_t>(num_dates_) * a_nodes_.size() * w_nodes_.size();
  actions_.assign(size, Action{});
  filled_.assign(size, 0);
}

PolicyMap PolicyMap::static_policy(const ContractSpec& contract, const GridSpec& grid) {
  const Schedule schedule = contract.schedule();
  PolicyMap map(grid.w_nodes, grid.a_nodes, schedule.num_dates() - 1);
  for (int n = 1; n <= map.num_dates_; ++n) {
    for (std::size_t j = 0; j < grid.a_nodes.size(); ++j) {
      const double gamma = std::min(schedule.contractual[n], grid.a_nodes[j]);
      for (std::size_t m = 0; m < grid.w_nodes.size(); ++m) {
        map.set(n, static_cast<int>(j), static_cast<int>(m), {ActionCode::Withdraw, gamma});
      }
    }
  }
  return map;
}

std::size_t PolicyMap::index(int date, int a_index, int w_index) const {
  if (date < 1 || date > num_dates_ || a_index < 0 ||
      a_index >= static_cast<int>(a_nodes_.size()) || w_index < 0 ||
      w_index >= static_cast<int>(w_nodes_.size())) {
    throw std::out_of_range("policy map: entry (" + std::to_string(date) + ", " +
                            std::to_string(a_index) + ", " + std::to_string(w_index) +
                            ") outside the table");
  }
  return (static_cast<std::size_t>(date - 1) * a_nodes_.size() + a_index) * w_nodes_.size() +
         w_index;
}

void PolicyMap::set(int date, int a_index, int w_index, Action action) {
  const std::size_t i = index(date, a_index, w_index);
  actions_[i] = action;
  filled_[i] = 1;
}

const Action& PolicyMap::at(int date, int a_index, int w_index) const {
  const std::size_t i = index(date, a_index, w_index);
  if (!filled_[i]) {
    throw std::runtime_error("policy map: missing entry for date " + std::to_string(date) +
                             ", a_index " + std::to_string(a_index) + ", w_index " +
                             std::to_string(w_index));
  }
  return actions_[i];
}

Action PolicyMap::lookup(int date, double wealth, double guarantee) const {
  // nearest A-node
  const auto a_hi = std::lower_bound(a_nodes_.begin(), a_nodes_.end(), guarantee);
  int j = 0;
  if (a_hi == a_nodes_.end()) {
    j = static_cast<int>(a_nodes_.size()) - 1;
  } else if (a_hi == a_nodes_.begin()) {
    j = 0;
  } else {
    const auto a_lo = a_hi - 1;
    j = static_cast<int>((guarantee - *a_lo <= *a_hi - guarantee ? a_lo : a_hi) - a_nodes_.begin());
  }

  Action action;
  if (wealth <= w_nodes_.front()) {
    action = at(date, j, 0);
  } else if (wealth >= w_nodes_.back()) {
    action = at(date, j, static_cast<int>(w_nodes_.size()) - 1);
  } else {
    const auto w_hi = std::upper_bound(w_nodes_.begin(), w_nodes_.end(), wealth);
    const int hi = static_cast<int>(w_hi - w_nodes_.begin());
    const int lo = hi - 1;
    const Action& left = at(date, j, lo);
    const Action& right = at(date, j, hi);
    const double t = (wealth - w_nodes_[lo]) / (w_nodes_[hi] - w_nodes_[lo]);
    if (left.code == ActionCode::Withdraw && right.code == ActionCode::Withdraw) {
      action = {ActionCode::Withdraw, left.amount + t * (right.amount - left.amount)};
    } else {
      action = t <= 0.5 ? left : right;
    }
  }
  if (action.code == ActionCode::Withdraw) {
    action.amount = std::clamp(action.amount, 0.0, guarantee);
  }
  return action;
}

void PolicyMap::write(std::ostream& out) const {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf.precision(17);
  buf << kMagic << '\n';
  buf << "dates," << num_dates_ << '\n';
  buf << "w_nodes," << w_nodes_.size() << '\n';
  buf << "a_nodes," << a_nodes_.size() << '\n';
  buf << "date,w_index,a_index,w,a,action,amount\n";
  for (int n = 1; n <= num_dates_; ++n) {
    for (std::size_t m = 0; m < w_nodes_.size(); ++m) {
      for (std::size_t j = 0; j < a_nodes_.size(); ++j) {
        const Action& act = at(n, static_cast<int>(j), static_cast<int>(m));
        buf << n << ',' << m << ',' << j << ',' << w_nodes_[m] << ',' << a_nodes_[j] << ','
            << static_cast<int>(act.code) << ',' << act.amount << '\n';
      }
    }
  }
  out << buf.str();
}

PolicyMap PolicyMap::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw std::runtime_error("policy map: missing '" + std::string(kMagic) + "' header");
  }
  const int dates = expect_header(in, "dates");
  const int num_w = expect_header(in, "w_nodes");
  const int num_a = expect_header(in, "a_nodes");
  if (dates < 0 || num_w < 1 || num_a < 1) throw std::runtime_error("policy map: bad sizes");
  if (!std::getline(in, line) || line != "date,w_index,a_index,w,a,action,amount") {
    throw std::runtime_error("policy map: missing column header");
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> w(num_w, nan);
  std::vector<double> a(num_a, nan);
  struct Row {
    int n, m, j;
    Action act;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) throw std::runtime_error("policy map: expected 7 fields: " + line);
    Row row{static_cast<int>(parse_long(f[0])), static_cast<int>(parse_long(f[1])),
            static_cast<int>(parse_long(f[2])), {}};
    if (row.m < 0 || row.m >= num_w || row.j < 0 || row.j >= num_a) {
      throw std::runtime_error("policy map: index out of range: " + line);
    }
    w[row.m] = parse_double(f[3]);
    a[row.j] = parse_double(f[4]);
    const long code = parse_long(f[5]);
    if (code != 0 && code != 1) throw std::runtime_error("policy map: bad action code: " + line);
    row.act = {static_cast<ActionCode>(code), parse_double(f[6])};
    rows.push_back(row);
  }
  for (double v : w) {
    if (std::isnan(v)) throw std::runtime_error("policy map: missing W-node rows");
  }
  for (double v : a) {
    if (std::isnan(v)) throw std::runtime_error("policy map: missing A-node rows");
  }
  PolicyMap map(std::move(w), std::move(a), dates);
  for (const Row& row : rows) map.set(row.n, row.j, row.m, row.act);
  for (std::size_t i = 0; i < map.filled_.size(); ++i) {
    if (!map.filled_[i]) throw std::runtime_error("policy map: missing policy entries");
  }
  return map;
}

}  // namespace gmwb
