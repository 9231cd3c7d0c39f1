#pragma once

// Post-dispatch economics: reserve and ramp envelopes, the cost-recovery
// uplift, expected and realized profits, and renewable payment with
// curtailment.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gridclear/errors.hpp"
#include "gridclear/fleet.hpp"

namespace gridclear {

/// [unit][hour]
using HourlyTable = std::vector<std::vector<double>>;

/// Linear cost slopes. production[i] is $/MWh for unit i; reserve is $ per MW
/// of reserve per hour; ramp is $ per MW/h of ramp capability per hour.
struct CostFunctions {
  std::vector<double> production;
  double reserve = 0.0;
  double ramp = 0.0;

  static CostFunctions from_fleet(const Fleet& fleet, double reserve_rate = 0.0, double ramp_rate = 0.0) {
    CostFunctions c;
    for (const auto& g : fleet.units()) c.production.push_back(g.production_cost_rate);
    c.reserve = reserve_rate;
    c.ramp = ramp_rate;
    c.validate();
    return c;
  }

  void validate() const {
    for (double v : production) {
      if (!(v >= 0.0 && std::isfinite(v))) throw ConfigError("production cost slope must be finite and >= 0");
    }
    if (!(reserve >= 0.0 && std::isfinite(reserve))) throw ConfigError("reserve cost slope must be finite and >= 0");
    if (!(ramp >= 0.0 && std::isfinite(ramp))) throw ConfigError("ramp cost slope must be finite and >= 0");
  }
};

enum class ProfitMode {
  kLiteral,       // p (lambda - lambda_w (1 - CR)) - f_p(p)
  kRecoveryPaid   // literal plus lambda_w * CR per MWh: recovered cost goes to generators
};

struct ReserveViolation {
  enum class Kind { kAboveCommitment, kReserve, kRamp } kind;
  std::size_t unit;
  std::size_t hour;
  std::size_t scenario;        // worst scenario at `hour`
  std::size_t next_scenario;   // ramp only: worst scenario at hour + 1
  double needed;
  double cap;
  std::string message;
};

struct ReserveCheck {
  HourlyTable reserve;  // rp, tight envelope
  HourlyTable ramp;     // dp, tight envelope; zero in the last hour
  std::vector<ReserveViolation> violations;
};

namespace detail {

inline void check_shape(const HourlyTable& t, std::size_t units, std::size_t hours, const char* what) {
  if (t.size() != units) throw DomainError(std::string(what) + " needs one row per unit");
  for (const auto& row : t) {
    if (row.size() != hours) throw DomainError(std::string(what) + " needs one entry per hour");
  }
}

inline std::size_t hours_of(const HourlyTable& t) { return t.empty() ? 0 : t.front().size(); }

}  // namespace detail

/// Sets rp to the largest shortfall of realized output below commitment and
/// dp to the largest swing between any scenario at t and any scenario at t+1,
/// then checks both against the unit caps.
inline ReserveCheck reserve_and_ramp_check(const HourlyTable& committed, const std::vector<HourlyTable>& realized,
                                           const Fleet& fleet) {
  const std::size_t n = fleet.size();
  const std::size_t T = detail::hours_of(committed);
  detail::check_shape(committed, n, T, "committed schedule");
  if (realized.empty()) throw DomainError("realized dispatch needs at least one scenario");
  for (const auto& r : realized) detail::check_shape(r, n, T, "realized dispatch");
  constexpr double tol = 1e-9;

  ReserveCheck out;
  out.reserve.assign(n, std::vector<double>(T, 0.0));
  out.ramp.assign(n, std::vector<double>(T, 0.0));
  const std::size_t K = realized.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = fleet[i];
    for (std::size_t t = 0; t < T; ++t) {
      double worst = 0.0;
      std::size_t worst_k = 0;
      for (std::size_t k = 0; k < K; ++k) {
        const double delta = committed[i][t] - realized[k][i][t];
        if (delta < -tol) {
          out.violations.push_back({ReserveViolation::Kind::kAboveCommitment, i, t, k, k, -delta, 0.0,
                                    g.name + ": scenario " + std::to_string(k + 1) + " at hour " + std::to_string(t + 1) +
                                        " exceeds commitment by " + std::to_string(-delta) + " MW"});
        }
        if (delta > worst) {
          worst = delta;
          worst_k = k;
        }
      }
      out.reserve[i][t] = worst;
      if (worst > g.rp_max + tol) {
        out.violations.push_back({ReserveViolation::Kind::kReserve, i, t, worst_k, worst_k, worst, g.rp_max,
                                  g.name + ": needs " + std::to_string(worst) + " MW reserve at hour " +
                                      std::to_string(t + 1) + ", cap " + std::to_string(g.rp_max)});
      }
      if (t + 1 == T) continue;
      std::size_t hi_now = 0, lo_now = 0, hi_next = 0, lo_next = 0;
      for (std::size_t k = 1; k < K; ++k) {
        if (realized[k][i][t] > realized[hi_now][i][t]) hi_now = k;
        if (realized[k][i][t] < realized[lo_now][i][t]) lo_now = k;
        if (realized[k][i][t + 1] > realized[hi_next][i][t + 1]) hi_next = k;
        if (realized[k][i][t + 1] < realized[lo_next][i][t + 1]) lo_next = k;
      }
      const double down = realized[hi_now][i][t] - realized[lo_next][i][t + 1];
      const double up = realized[hi_next][i][t + 1] - realized[lo_now][i][t];
      const bool use_down = down >= up;
      const double swing = std::max({down, up, 0.0});
      out.ramp[i][t] = swing;
      if (swing > g.ramp_max + tol) {
        const std::size_t k1 = use_down ? hi_now : lo_now;
        const std::size_t k2 = use_down ? lo_next : hi_next;
        out.violations.push_back({ReserveViolation::Kind::kRamp, i, t, k1, k2, swing, g.ramp_max,
                                  g.name + ": swing " + std::to_string(swing) + " MW between scenario " +
                                      std::to_string(k1 + 1) + " at hour " + std::to_string(t + 1) + " and scenario " +
                                      std::to_string(k2 + 1) + " at hour " + std::to_string(t + 2) + ", cap " +
                                      std::to_string(g.ramp_max)});
      }
    }
  }
  return out;
}

/// Start cost selection: a unit that has been offline for at most
/// `hot_threshold_hours` pays the hot start cost, otherwise the cold one.
/// Before hour 1 every unit has been offline `initial_offline_hours`.
struct StartPolicy {
  double initial_offline_hours = 24.0;
  double hot_threshold_hours = 1.0;
};

struct Recovery {
  double H = 0.0;
  double lambda_w = 0.0;
  std::vector<std::vector<int>> online;  // I[unit][hour]
  std::vector<double> per_unit;          // H share of each unit
};

/// I = 1 iff committed power is positive.
inline std::vector<std::vector<int>> commitment_indicators(const HourlyTable& committed) {
  std::vector<std::vector<int>> on(committed.size());
  for (std::size_t i = 0; i < committed.size(); ++i) {
    for (double p : committed[i]) on[i].push_back(p > 0.0 ? 1 : 0);
  }
  return on;
}

/// H = sum over units and hours of no-load, start, reserve and ramp costs;
/// lambda_w = H / committed energy when cost recovery is on, else 0.
inline Recovery recovery_rate(const HourlyTable& committed, const ReserveCheck& envelopes, const Fleet& fleet,
                              const CostFunctions& costs, bool cost_recovery, const StartPolicy& policy = {}) {
  const std::size_t n = fleet.size();
  const std::size_t T = detail::hours_of(committed);
  detail::check_shape(committed, n, T, "committed schedule");
  detail::check_shape(envelopes.reserve, n, T, "reserve envelope");
  detail::check_shape(envelopes.ramp, n, T, "ramp envelope");
  Recovery r;
  r.online = commitment_indicators(committed);
  r.per_unit.assign(n, 0.0);
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = fleet[i];
    double offline = policy.initial_offline_hours;
    int prev = 0;
    double h = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const int on = r.online[i][t];
      energy += committed[i][t];
      if (on) {
        h += g.no_load_cost;
        if (!prev) h += offline <= policy.hot_threshold_hours ? g.hot_start : g.cold_start;
        offline = 0.0;
      } else {
        offline += 1.0;
      }
      h += costs.reserve * envelopes.reserve[i][t] + costs.ramp * envelopes.ramp[i][t];
      prev = on;
    }
    r.per_unit[i] = h;
    r.H += h;
  }
  if (cost_recovery) {
    if (energy > 0.0) {
      r.lambda_w = r.H / energy;
    } else if (r.H > 0.0) {
      throw DomainError("cost recovery rate undefined: positive recovery cost with zero committed energy");
    }
  }
  return r;
}

namespace detail {

inline double unit_profit(double p, double lmp, double lambda_w, bool cr, double production, ProfitMode mode) {
  const double crf = cr ? 1.0 : 0.0;
  double v = p * (lmp - lambda_w * (1.0 - crf)) - production * p;
  if (mode == ProfitMode::kRecoveryPaid) v += p * lambda_w * crf;
  return v;
}

}  // namespace detail

/// Profit at commitment, summed over units and hours. `lmp` is the price
/// each unit is paid, per unit and hour.
inline double expected_profit(const HourlyTable& committed, const HourlyTable& lmp, double lambda_w, bool cost_recovery,
                              const CostFunctions& costs, ProfitMode mode = ProfitMode::kLiteral) {
  const std::size_t n = committed.size();
  const std::size_t T = detail::hours_of(committed);
  detail::check_shape(lmp, n, T, "lmp table");
  if (costs.production.size() != n) throw DomainError("cost functions need one production slope per unit");
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      r += detail::unit_profit(committed[i][t], lmp[i][t], lambda_w, cost_recovery, costs.production[i], mode);
    }
  }
  return r;
}

/// Probability-weighted profit of the power actually sold in each scenario at
/// the committed prices.
inline double realized_profit(const std::vector<HourlyTable>& realized, std::span<const double> probabilities,
                              const HourlyTable& lmp, double lambda_w, bool cost_recovery, const CostFunctions& costs,
                              ProfitMode mode = ProfitMode::kLiteral) {
  if (realized.size() != probabilities.size()) throw DomainError("one probability per scenario required");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw DomainError("scenario probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("scenario probabilities must sum to 1");
  if (realized.empty()) return 0.0;
  // accumulated as differences from the first scenario
  const double first = expected_profit(realized[0], lmp, lambda_w, cost_recovery, costs, mode);
  double spread = 0.0;
  for (std::size_t k = 1; k < realized.size(); ++k) {
    if (probabilities[k] == 0.0) continue;
    spread += probabilities[k] * (expected_profit(realized[k], lmp, lambda_w, cost_recovery, costs, mode) - first);
  }
  return first + spread;
}

/// R - R_tilde, signed.
inline double deviation_cost(double expected, double realized) { return expected - realized; }

struct RenewablePayment {
  double revenue = 0.0;
  double curtailed_mwh = 0.0;
  std::vector<double> per_bus;
};

/// One hour. If renewables exceed the total load, the excess is curtailed and
/// the pot sum_i lmp_i * load_i is shared in proportion to output; otherwise
/// each bus is paid lmp_i * output.
inline RenewablePayment curtail_and_pay_renewables(std::span<const double> loads, std::span<const double> renewables,
                                                   std::span<const double> lmps) {
  const std::size_t n = loads.size();
  if (renewables.size() != n || lmps.size() != n) throw DomainError("loads, renewables and prices differ in length");
  RenewablePayment out;
  out.per_bus.assign(n, 0.0);
  double total_load = 0.0, total_ren = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_load += loads[i];
    total_ren += renewables[i];
    pot += lmps[i] * loads[i];
  }
  if (total_ren > total_load) {
    out.curtailed_mwh = total_ren - total_load;
    for (std::size_t i = 0; i < n; ++i) out.per_bus[i] = pot * renewables[i] / total_ren;
  } else {
    for (std::size_t i = 0; i < n; ++i) out.per_bus[i] = lmps[i] * renewables[i];
  }
  for (double v : out.per_bus) out.revenue += v;
  return out;
}

struct SettlementReport {
  double H = 0.0;
  double lambda_w = 0.0;
  double expected_profit = 0.0;  // R
  double realized_profit = 0.0;  // R_tilde
  double deviation_cost = 0.0;
  double renewable_revenue = 0.0;  // expectation over scenarios
  double curtailed_mwh = 0.0;      // expectation over scenarios
  std::vector<double> unit_expected_profit;
  std::vector<double> unit_realized_profit;
  std::vector<double> unit_recovery_cost;
  std::vector<std::vector<int>> online;
  std::vector<ReserveViolation> violations;
};

}  // namespace gridclear
