#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "gridclear/errors.hpp"

namespace gridclear {

/// One non-renewable unit. Prices in $/MWh, powers in MW, costs in $.
struct GeneratorSpec {
  std::string name;
  double ask_price = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;
  double rp_max = 0.0;
  double ramp_max = 0.0;
  double hot_start = 0.0;
  double cold_start = 0.0;
  double no_load_cost = 0.0;  // $/h
  double production_cost_rate = 0.0;

  void validate() const {
    auto require = [&](bool ok, const char* field) {
      if (!ok) throw ConfigError("generator '" + name + "': invalid " + field);
    };
    require(std::isfinite(ask_price) && ask_price >= 0.0, "ask_price");
    require(std::isfinite(p_min) && p_min >= 0.0, "p_min");
    require(std::isfinite(p_max) && p_max >= p_min, "p_max");
    require(std::isfinite(rp_max) && rp_max >= 0.0, "rp_max");
    require(std::isfinite(ramp_max) && ramp_max >= 0.0, "ramp_max");
    require(std::isfinite(hot_start) && hot_start >= 0.0, "hot_start");
    require(std::isfinite(cold_start) && cold_start >= 0.0, "cold_start");
    require(std::isfinite(no_load_cost) && no_load_cost >= 0.0, "no_load_cost");
    require(std::isfinite(production_cost_rate) && production_cost_rate >= 0.0, "production_cost_rate");
  }
};

/// Generators in merit order. Ask prices must be strictly increasing and
/// strictly above the renewable ask price.
class Fleet {
 public:
  explicit Fleet(std::vector<GeneratorSpec> units, double renewable_price = 0.0)
      : units_(std::move(units)), renewable_price_(renewable_price) {
    if (units_.empty()) throw ConfigError("fleet must contain at least one generator");
    if (!(renewable_price_ >= 0.0)) throw ConfigError("renewable ask price must be >= 0");
    for (const auto& g : units_) g.validate();
    if (!(renewable_price_ < units_.front().ask_price)) {
      throw ConfigError("renewable ask price must be below the cheapest generator ask price");
    }
    for (std::size_t i = 1; i < units_.size(); ++i) {
      if (!(units_[i].ask_price > units_[i - 1].ask_price)) {
        throw ConfigError("ask prices must be strictly increasing: '" + units_[i - 1].name + "' and '" +
                          units_[i].name + "'");
      }
    }
  }

  std::size_t size() const noexcept { return units_.size(); }
  const GeneratorSpec& operator[](std::size_t i) const { return units_[i]; }
  const std::vector<GeneratorSpec>& units() const noexcept { return units_; }
  double renewable_price() const noexcept { return renewable_price_; }

  double total_capacity() const noexcept {
    double s = 0.0;
    for (const auto& g : units_) s += g.p_max;
    return s;
  }

 private:
  std::vector<GeneratorSpec> units_;
  double renewable_price_;
};

/// The seven-unit test fleet (production cost doubles as the ask price).
inline Fleet builtin_fleet() {
  struct Row {
    double price, p_max, hot, cold, ramp;
  };
  static constexpr Row rows[] = {
      {7.37, 400, 0.0, 0.0, 400},         {22.23, 155, 2258.6, 616.2, 155},
      {31.55, 76, 1412.5, 1412.5, 76},    {176.05, 197, 14182.5, 8106.9, 197},
      {180.75, 100, 10357.8, 4575.0, 100}, {241.91, 12, 1244.4, 695.4, 12},
      {315.81, 20, 109.5, 109.5, 20},
  };
  std::vector<GeneratorSpec> units;
  int idx = 1;
  for (const auto& r : rows) {
    GeneratorSpec g;
    g.name = "G" + std::to_string(idx++);
    g.ask_price = r.price;
    g.p_min = 0.0;
    g.p_max = r.p_max;
    g.rp_max = r.p_max;
    g.ramp_max = r.ramp;
    g.hot_start = r.hot;
    g.cold_start = r.cold;
    g.no_load_cost = 0.0;
    g.production_cost_rate = r.price;
    units.push_back(std::move(g));
  }
  return Fleet(std::move(units), 0.0);
}

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Parses name,ask_price,p_min,p_max,rp_max,ramp_max,hot_start,cold_start,
/// no_load_cost with an optional trailing production_cost column (defaults to
/// the ask price). Rows are sorted by ask price before validation.
inline Fleet parse_fleet_csv(std::istream& in, double renewable_price = 0.0) {
  static const std::vector<std::string> expected = {"name",     "ask_price", "p_min",      "p_max",       "rp_max",
                                                    "ramp_max", "hot_start", "cold_start", "no_load_cost"};
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    header = detail::split_csv_line(line);
    break;
  }
  if (header.empty()) throw ParseError(lineno, "missing fleet header");
  const bool has_production = header.size() == expected.size() + 1 && header.back() == "production_cost";
  const bool prefix_ok =
      header.size() >= expected.size() && std::equal(expected.begin(), expected.end(), header.begin());
  if (!prefix_ok || !(header.size() == expected.size() || has_production)) {
    throw ParseError(lineno, "unexpected fleet header");
  }

  std::vector<GeneratorSpec> units;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    }
    auto number = [&](std::size_t col) {
      const std::string& c = cells[col];
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size() || !std::isfinite(v)) {
        throw ParseError(lineno, "field '" + header[col] + "' is not a number: '" + c + "'");
      }
      return v;
    };
    GeneratorSpec g;
    g.name = cells[0];
    g.ask_price = number(1);
    g.p_min = number(2);
    g.p_max = number(3);
    g.rp_max = number(4);
    g.ramp_max = number(5);
    g.hot_start = number(6);
    g.cold_start = number(7);
    g.no_load_cost = number(8);
    g.production_cost_rate = has_production ? number(9) : g.ask_price;
    try {
      g.validate();
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
    units.push_back(std::move(g));
  }
  std::stable_sort(units.begin(), units.end(),
                   [](const GeneratorSpec& a, const GeneratorSpec& b) { return a.ask_price < b.ask_price; });
  return Fleet(std::move(units), renewable_price);
}

inline Fleet load_fleet(const std::string& source) {
  if (source == "builtin") return builtin_fleet();
  std::ifstream in(source);
  if (!in) throw ConfigError("cannot open fleet file " + source);
  return parse_fleet_csv(in);
}

}  // namespace gridclear
