#pragma once

// End-to-end runs: scenario generation, commitment, realized dispatch and
// settlement for one (alpha, penetration) point, and the two sweeps built on
// top of it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gridclear/csv.hpp"
#include "gridclear/errors.hpp"
#include "gridclear/fleet.hpp"
#include "gridclear/merit_order.hpp"
#include "gridclear/radial_dispatch.hpp"
#include "gridclear/risk.hpp"
#include "gridclear/scenario.hpp"
#include "gridclear/settlement.hpp"

namespace gridclear {

/// System and scenario parameters shared by every run.
struct ModelParams {
  int n_buses = 7;
  double total_load = 650.0;          // MW, mean over the horizon
  double load_std_fraction = 0.05;    // per-bus std as a fraction of the mean
  double capacity_factor = 0.5;       // installed renewable capacity = penetration * load / cf
  double uncertainty_growth = 0.15;
  double reserve_cost = 30.0;         // $/MW per hour
  double ramp_cost = 5.0;             // $/(MW/h) per hour
  double hourly_amplitude = 0.15;     // load profile 1 + a sin(2 pi t / 24)
  bool common_weather = true;
};

struct RunConfig {
  std::string fleet = "builtin";
  std::vector<double> alphas{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  std::vector<double> penetrations{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int n_scenarios = 200;
  std::uint64_t seed = 42;
  double line_limit = std::numeric_limits<double>::infinity();
  bool cost_recovery = true;
  int horizon = 1;
  std::string out_dir = "out";
  double alpha_sweep_penetration = 0.3;
  double penetration_sweep_alpha = 0.9;
  ProfitMode profit_mode = ProfitMode::kLiteral;
  StartPolicy starts;
  ModelParams model;

  bool radial() const noexcept { return std::isfinite(line_limit); }

  void validate() const {
    if (alphas.empty()) throw ConfigError("alpha grid is empty");
    if (penetrations.empty()) throw ConfigError("penetration grid is empty");
    for (double a : alphas) RiskLevel{a};
    RiskLevel{penetration_sweep_alpha};
    for (double p : penetrations) {
      if (!(p >= 0.0 && std::isfinite(p))) throw ConfigError("penetration must be finite and >= 0");
    }
    if (!(alpha_sweep_penetration >= 0.0)) throw ConfigError("penetration must be >= 0");
    if (n_scenarios < 1) throw ConfigError("scenario count must be >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(line_limit > 0.0)) throw ConfigError("line limit must be positive");
    if (model.n_buses < 1) throw ConfigError("bus count must be >= 1");
    if (!(model.total_load >= 0.0 && std::isfinite(model.total_load))) throw ConfigError("total load must be >= 0");
    if (!(model.load_std_fraction >= 0.0)) throw ConfigError("load std fraction must be >= 0");
    if (!(model.capacity_factor > 0.0 && model.capacity_factor <= 1.0)) {
      throw ConfigError("capacity factor must lie in (0, 1]");
    }
    if (!(model.uncertainty_growth >= 0.0)) throw ConfigError("uncertainty growth must be >= 0");
    if (!(model.reserve_cost >= 0.0) || !(model.ramp_cost >= 0.0)) throw ConfigError("cost slopes must be >= 0");
    if (!(std::abs(model.hourly_amplitude) < 1.0)) throw ConfigError("hourly amplitude must lie in (-1, 1)");
  }
};

/// Bus loads for every hour: equal split of the system load, shaped by the
/// daily profile.
inline std::vector<std::vector<double>> load_profile(const ModelParams& m, int horizon) {
  std::vector<std::vector<double>> out(m.n_buses, std::vector<double>(horizon));
  const double per_bus = m.total_load / m.n_buses;
  for (int t = 0; t < horizon; ++t) {
    const double shape = 1.0 + m.hourly_amplitude * std::sin(2.0 * std::numbers::pi * t / 24.0);
    for (int i = 0; i < m.n_buses; ++i) out[i][t] = per_bus * shape;
  }
  return out;
}

inline ScenarioConfig scenario_config(const RunConfig& cfg, double penetration) {
  ScenarioConfig sc;
  sc.n_buses = cfg.model.n_buses;
  sc.horizon = cfg.horizon;
  sc.n_scenarios = cfg.n_scenarios;
  sc.seed = cfg.seed;
  sc.load_mean = load_profile(cfg.model, cfg.horizon);
  sc.load_std = sc.load_mean;
  for (auto& row : sc.load_std) {
    for (auto& v : row) v *= cfg.model.load_std_fraction;
  }
  sc.renewable_capacity.assign(sc.n_buses, 0.0);
  for (int i = 0; i < sc.n_buses; ++i) {
    double mean = 0.0;
    for (double v : sc.load_mean[i]) mean += v;
    mean /= cfg.horizon;
    sc.renewable_capacity[i] = penetration * mean / cfg.model.capacity_factor;
  }
  sc.penetration = penetration;
  sc.uncertainty_growth = cfg.model.uncertainty_growth;
  sc.common_weather = cfg.model.common_weather;
  return sc;
}

struct PointResult {
  int run_id = 0;
  double alpha = 0.0;
  double penetration = 0.0;
  std::vector<double> committed_total;  // MW per hour
  std::vector<double> price;            // highest LMP per hour
  HourlyTable committed;                // [unit][hour]
  HourlyTable lmp;                      // [unit][hour]
  std::vector<HourlyTable> realized;    // [scenario][unit][hour]
  SettlementReport settlement;

  double mean_committed() const {
    double s = 0.0;
    for (double v : committed_total) s += v;
    return s / static_cast<double>(committed_total.size());
  }
  double mean_price() const {
    double s = 0.0;
    for (double v : price) s += v;
    return s / static_cast<double>(price.size());
  }
};

namespace detail {

/// Cheapest-first fill of a realized net load, each unit capped at its
/// commitment.
inline std::vector<double> fill_committed(const std::vector<double>& caps, double net) {
  double total = 0.0;
  for (double c : caps) total += c;
  if (net >= total - 1e-9 * std::max(1.0, total)) return caps;
  std::vector<double> out(caps.size(), 0.0);
  double rest = std::max(net, 0.0);
  for (std::size_t i = 0; i < caps.size(); ++i) {
    out[i] = std::min(rest, caps[i]);
    rest -= out[i];
  }
  return out;
}

}  // namespace detail

/// Commits, re-dispatches every scenario at the committed prices and settles.
inline PointResult run_point(const RunConfig& cfg, const Fleet& fleet, const ScenarioSet& set, double alpha,
                             double penetration, int run_id = 1) {
  const RiskLevel level(alpha);
  const std::size_t n = fleet.size();
  const int T = set.horizon();
  const int K = set.n_scenarios();
  const int buses = set.n_buses();
  PointResult r;
  r.run_id = run_id;
  r.alpha = alpha;
  r.penetration = penetration;
  r.committed.assign(n, std::vector<double>(T, 0.0));
  r.lmp.assign(n, std::vector<double>(T, 0.0));
  r.realized.assign(K, HourlyTable(n, std::vector<double>(T, 0.0)));
  std::vector<std::vector<double>> bus_lmp(buses, std::vector<double>(T, 0.0));

  if (cfg.radial() && static_cast<std::size_t>(buses) != n) {
    throw ConfigError("a radial run needs one generator per bus: " + std::to_string(buses) + " buses, " +
                      std::to_string(n) + " generators");
  }
  for (int t = 0; t < T; ++t) {
    if (!cfg.radial()) {
      const double requirement = std::max(0.0, cvar_direct(aggregate_net_load(set, t), level));
      const DispatchResult d = commit(fleet, requirement);
      for (std::size_t i = 0; i < n; ++i) {
        r.committed[i][t] = d.power[i];
        r.lmp[i][t] = d.clearing_price;
      }
      for (int b = 0; b < buses; ++b) bus_lmp[b][t] = d.clearing_price;
      r.committed_total.push_back(d.total());
      r.price.push_back(d.clearing_price);
      std::vector<double> caps = d.power;
      for (int k = 0; k < K; ++k) {
        double net = 0.0;
        for (int b = 0; b < buses; ++b) net += set.net(b, t, k);
        const auto p = detail::fill_committed(caps, std::min(net, d.total()));
        for (std::size_t i = 0; i < n; ++i) r.realized[k][i][t] = p[i];
      }
    } else {
      const RadialGrid grid(buses, cfg.line_limit);
      std::vector<double> per(buses), suffix(buses);
      for (int b = 0; b < buses; ++b) {
        per[b] = cvar_direct(net_load(set, b, t), level);
        suffix[b] = cvar_direct(suffix_net_load(set, b, t), level);
      }
      const CongestedDispatch d = dispatch_radial(grid, fleet, per, suffix);
      for (std::size_t i = 0; i < n; ++i) {
        r.committed[i][t] = d.power[i];
        r.lmp[i][t] = d.lmp[i];
        bus_lmp[i][t] = d.lmp[i];
      }
      r.committed_total.push_back(d.total());
      r.price.push_back(*std::max_element(d.lmp.begin(), d.lmp.end()));
      std::vector<double> point(buses), point_suffix(buses);
      for (int k = 0; k < K; ++k) {
        double acc = 0.0;
        for (int b = buses; b-- > 0;) {
          point[b] = set.net(b, t, k);
          acc += point[b];
          point_suffix[b] = acc;
        }
        const auto a = detail::radial_allocation(cfg.line_limit, point, point_suffix);
        for (std::size_t i = 0; i < n; ++i) r.realized[k][i][t] = std::min(a.power[i], d.power[i]);
      }
    }
  }

  const CostFunctions costs = CostFunctions::from_fleet(fleet, cfg.model.reserve_cost, cfg.model.ramp_cost);
  const ReserveCheck envelopes = reserve_and_ramp_check(r.committed, r.realized, fleet);
  const Recovery rec = recovery_rate(r.committed, envelopes, fleet, costs, cfg.cost_recovery, cfg.starts);
  auto& s = r.settlement;
  s.H = rec.H;
  s.lambda_w = rec.lambda_w;
  s.online = rec.online;
  s.unit_recovery_cost = rec.per_unit;
  s.violations = envelopes.violations;
  s.expected_profit = expected_profit(r.committed, r.lmp, s.lambda_w, cfg.cost_recovery, costs, cfg.profit_mode);
  s.realized_profit =
      realized_profit(r.realized, set.probabilities(), r.lmp, s.lambda_w, cfg.cost_recovery, costs, cfg.profit_mode);
  s.deviation_cost = deviation_cost(s.expected_profit, s.realized_profit);
  s.unit_expected_profit.assign(n, 0.0);
  s.unit_realized_profit.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const HourlyTable one_c{r.committed[i]};
    const HourlyTable one_l{r.lmp[i]};
    CostFunctions one_cost{{costs.production[i]}, costs.reserve, costs.ramp};
    s.unit_expected_profit[i] = expected_profit(one_c, one_l, s.lambda_w, cfg.cost_recovery, one_cost, cfg.profit_mode);
    for (int k = 0; k < K; ++k) {
      const HourlyTable one_r{r.realized[k][i]};
      s.unit_realized_profit[i] += set.probabilities()[k] *
          expected_profit(one_r, one_l, s.lambda_w, cfg.cost_recovery, one_cost, cfg.profit_mode);
    }
  }
  std::vector<double> loads(buses), ren(buses), prices(buses);
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < T; ++t) {
      for (int b = 0; b < buses; ++b) {
        loads[b] = set.load(b, t, k);
        ren[b] = set.renewable(b, t, k);
        prices[b] = bus_lmp[b][t];
      }
      const auto pay = curtail_and_pay_renewables(loads, ren, prices);
      s.renewable_revenue += set.probabilities()[k] * pay.revenue;
      s.curtailed_mwh += set.probabilities()[k] * pay.curtailed_mwh;
    }
  }
  return r;
}

struct SweepResult {
  std::vector<PointResult> points;
  std::vector<std::string> diagnostics;  // one per skipped grid point
};

namespace detail {

template <class Body>
void guarded_point(SweepResult& out, double alpha, double penetration, Body&& body) {
  try {
    out.points.push_back(body());
  } catch (const InfeasibleError& e) {
    out.diagnostics.push_back("alpha " + std::to_string(alpha) + ", penetration " + std::to_string(penetration) +
                              ": infeasible: " + e.what());
  } catch (const ConfigError& e) {
    out.diagnostics.push_back("alpha " + std::to_string(alpha) + ", penetration " + std::to_string(penetration) +
                              ": " + e.what());
  }
}

}  // namespace detail

/// One scenario set at the fixed penetration, one row per alpha.
inline SweepResult run_alpha_sweep(const RunConfig& cfg, const Fleet& fleet) {
  cfg.validate();
  SweepResult out;
  const double pen = cfg.alpha_sweep_penetration;
  const ScenarioSet set = generate_scenarios(scenario_config(cfg, pen));
  int id = 0;
  for (double a : cfg.alphas) {
    ++id;
    detail::guarded_point(out, a, pen, [&] { return run_point(cfg, fleet, set, a, pen, id); });
  }
  return out;
}

/// One scenario set per penetration level, all drawn from the same seed.
inline SweepResult run_penetration_sweep(const RunConfig& cfg, const Fleet& fleet) {
  cfg.validate();
  SweepResult out;
  const double a = cfg.penetration_sweep_alpha;
  int id = 0;
  for (double pen : cfg.penetrations) {
    ++id;
    detail::guarded_point(out, a, pen, [&] {
      const ScenarioSet set = generate_scenarios(scenario_config(cfg, pen));
      return run_point(cfg, fleet, set, a, pen, id);
    });
  }
  return out;
}

/// Every (alpha, penetration) pair of the grids, alpha-major.
inline SweepResult run_grid(const RunConfig& cfg, const Fleet& fleet) {
  cfg.validate();
  SweepResult out;
  int id = 0;
  for (double pen : cfg.penetrations) {
    std::optional<ScenarioSet> set;
    for (double a : cfg.alphas) {
      ++id;
      detail::guarded_point(out, a, pen, [&] {
        if (!set) set = generate_scenarios(scenario_config(cfg, pen));
        return run_point(cfg, fleet, *set, a, pen, id);
      });
    }
  }
  return out;
}

inline CsvTable alpha_table(const SweepResult& s) {
  CsvTable t{{"alpha", "committed_mw", "price", "R", "R_tilde", "H", "lambda_w"}, {}};
  for (const auto& p : s.points) {
    t.rows.push_back({p.alpha, p.mean_committed(), p.mean_price(), p.settlement.expected_profit,
                      p.settlement.realized_profit, p.settlement.H, p.settlement.lambda_w});
  }
  return t;
}

inline CsvTable penetration_table(const SweepResult& s) {
  CsvTable t{{"penetration", "committed_mw", "price", "deviation_cost", "renewable_profit", "lambda_w"}, {}};
  for (const auto& p : s.points) {
    t.rows.push_back({p.penetration, p.mean_committed(), p.mean_price(), p.settlement.deviation_cost,
                      p.settlement.renewable_revenue, p.settlement.lambda_w});
  }
  return t;
}

inline CsvTable settlement_table(const SweepResult& s, bool cost_recovery) {
  CsvTable t{{"run_id", "alpha", "penetration", "CR", "H", "lambda_w", "R", "R_tilde", "deviation_cost",
              "renewable_revenue", "curtailed_mwh"},
             {}};
  for (const auto& p : s.points) {
    const auto& st = p.settlement;
    t.rows.push_back({std::int64_t{p.run_id}, p.alpha, p.penetration, std::int64_t{cost_recovery ? 1 : 0}, st.H,
                      st.lambda_w, st.expected_profit, st.realized_profit, st.deviation_cost, st.renewable_revenue,
                      st.curtailed_mwh});
  }
  return t;
}

inline CsvTable dispatch_table(const SweepResult& s, const Fleet& fleet) {
  CsvTable t{{"run_id", "alpha", "penetration", "hour", "unit", "committed_mw", "lmp"}, {}};
  for (const auto& p : s.points) {
    for (std::size_t h = 0; h < p.committed_total.size(); ++h) {
      for (std::size_t i = 0; i < fleet.size(); ++i) {
        t.rows.push_back({std::int64_t{p.run_id}, p.alpha, p.penetration, static_cast<std::int64_t>(h + 1),
                          fleet[i].name, p.committed[i][h], p.lmp[i][h]});
      }
    }
  }
  return t;
}

}  // namespace gridclear
