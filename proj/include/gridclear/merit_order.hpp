#pragma once

// Risk-based commitment on an uncongested grid: the committed total equals
// CVaR of the aggregate net load and is split across the fleet in merit
// order, with the clearing price set by the marginal unit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gridclear/errors.hpp"
#include "gridclear/fleet.hpp"

namespace gridclear {

enum class Regime {
  kInterior,    // marginal unit k takes the residual inside its bounds
  kBelowPmin,   // residual below p_min of unit k: unit k-1 backs down
  kSmallDemand  // demand below p_min of the cheapest unit
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::kInterior:
      return "interior";
    case Regime::kBelowPmin:
      return "below_pmin";
    case Regime::kSmallDemand:
      return "small_demand";
  }
  return "?";
}

struct DispatchResult {
  std::vector<double> power;     // MW per generator
  double clearing_price = 0.0;   // $/MWh
  std::vector<double> mu_upper;  // multiplier of p <= p_max
  std::vector<double> mu_lower;  // multiplier of p >= p_min
  Regime regime = Regime::kInterior;
  std::size_t marginal = 0;  // 0-based index of the price-setting unit

  double total() const noexcept {
    double s = 0.0;
    for (double p : power) s += p;
    return s;
  }
};

struct AssumptionViolation {
  std::string clause;  // "2a-lower", "2a-upper", "2b"
  std::size_t unit;    // 0-based, or npos when the clause is fleet-wide
  std::string message;
};

inline constexpr double kDispatchTolerance = 1e-9;

/// Diagnostics for the feasibility assumptions of the closed-form dispatch:
/// (a) min p_min <= demand <= sum p_max and (b) max p_min < min (p_max - p_min).
inline std::vector<AssumptionViolation> validate_assumptions(const Fleet& fleet, double demand) {
  std::vector<AssumptionViolation> out;
  std::size_t argmin_pmin = 0, argmax_pmin = 0, argmin_span = 0;
  for (std::size_t i = 1; i < fleet.size(); ++i) {
    if (fleet[i].p_min < fleet[argmin_pmin].p_min) argmin_pmin = i;
    if (fleet[i].p_min > fleet[argmax_pmin].p_min) argmax_pmin = i;
    if (fleet[i].p_max - fleet[i].p_min < fleet[argmin_span].p_max - fleet[argmin_span].p_min) argmin_span = i;
  }
  const double capacity = fleet.total_capacity();
  if (demand < fleet[argmin_pmin].p_min - kDispatchTolerance) {
    out.push_back({"2a-lower", argmin_pmin,
                   "demand " + std::to_string(demand) + " MW is below the smallest minimum output " +
                       std::to_string(fleet[argmin_pmin].p_min) + " MW of '" + fleet[argmin_pmin].name + "'"});
  }
  if (demand > capacity + kDispatchTolerance) {
    out.push_back({"2a-upper", std::string::npos,
                   "demand " + std::to_string(demand) + " MW exceeds fleet capacity " + std::to_string(capacity) + " MW"});
  }
  const double span = fleet[argmin_span].p_max - fleet[argmin_span].p_min;
  if (!(fleet[argmax_pmin].p_min < span)) {
    out.push_back({"2b", argmax_pmin,
                   "largest minimum output " + std::to_string(fleet[argmax_pmin].p_min) + " MW of '" +
                       fleet[argmax_pmin].name + "' is not below the narrowest operating range " + std::to_string(span) +
                       " MW of '" + fleet[argmin_span].name + "'"});
  }
  return out;
}

namespace detail {

inline bool is_off(const GeneratorSpec& g, double p) { return p == 0.0 && g.p_min > 0.0; }

/// KKT multipliers consistent with an allocation and a price. Units switched
/// off below a positive p_min have both bounds pinned at zero.
inline void fill_multipliers(const Fleet& fleet, DispatchResult& r) {
  const std::size_t n = fleet.size();
  r.mu_upper.assign(n, 0.0);
  r.mu_lower.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = fleet[i];
    const double p = r.power[i];
    const double gap = r.clearing_price - g.ask_price;
    const bool at_upper = p >= g.p_max - kDispatchTolerance;
    const bool at_lower = p <= g.p_min + kDispatchTolerance;
    if (is_off(g, p) || (at_upper && at_lower)) {
      r.mu_upper[i] = std::max(gap, 0.0);
      r.mu_lower[i] = std::max(-gap, 0.0);
    } else if (at_upper && gap >= 0.0) {
      r.mu_upper[i] = gap;
    } else if (at_lower && gap <= 0.0) {
      r.mu_lower[i] = -gap;
    }
  }
}

inline double cost_of(const Fleet& fleet, const std::vector<double>& p) {
  double c = 0.0;
  for (std::size_t i = 0; i < fleet.size(); ++i) c += fleet[i].ask_price * p[i];
  return c;
}

}  // namespace detail

/// Committed power and clearing price for a demanded CVaR.
///
/// Find k with sum_{i<k} p_max < demand <= sum_{i<=k} p_max. If the residual
/// fits unit k's range, units before k run flat out and unit k is marginal.
/// If the residual is below p_min_k, the first k-2 units run flat out, the
/// companion unit sits at max(p_min, residual) and unit k-1 absorbs the
/// difference; the companion is unit k unless a more expensive unit with a
/// smaller minimum is strictly cheaper overall. Demand below p_min of the
/// cheapest unit goes to the cheapest unit that can serve it alone.
inline DispatchResult commit(const Fleet& fleet, double demand) {
  const auto violations = validate_assumptions(fleet, demand);
  if (!violations.empty()) {
    std::string msg = "dispatch infeasible:";
    for (const auto& v : violations) msg += " [" + v.clause + "] " + v.message + ";";
    throw InfeasibleError(msg, demand, fleet.total_capacity());
  }
  const std::size_t n = fleet.size();
  DispatchResult r;
  r.power.assign(n, 0.0);
  demand = std::clamp(demand, 0.0, fleet.total_capacity());

  std::vector<double> cum(n);
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    running += fleet[i].p_max;
    cum[i] = running;
  }
  std::size_t k = 0;
  while (k + 1 < n && demand > cum[k] + kDispatchTolerance) ++k;
  const double before_k = k == 0 ? 0.0 : cum[k - 1];
  const double residual = demand - before_k;

  if (residual >= fleet[k].p_min - kDispatchTolerance) {
    for (std::size_t i = 0; i < k; ++i) r.power[i] = fleet[i].p_max;
    r.power[k] = std::min(std::max(residual, 0.0), fleet[k].p_max);
    r.regime = Regime::kInterior;
    r.marginal = k;
  } else if (k == 0) {
    std::size_t kbar = n;
    for (std::size_t i = 0; i < n && kbar == n; ++i) {
      if (fleet[i].p_min <= demand + kDispatchTolerance && demand <= fleet[i].p_max + kDispatchTolerance) kbar = i;
    }
    if (kbar == n) {
      throw InfeasibleError("no single unit can serve demand " + std::to_string(demand) + " MW", demand,
                            fleet.total_capacity());
    }
    r.power[kbar] = demand;
    r.regime = Regime::kSmallDemand;
    r.marginal = kbar;
  } else {
    r.regime = Regime::kBelowPmin;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t m = k; m < n; ++m) {
      const double companion = std::max(fleet[m].p_min, residual);
      if (companion > fleet[m].p_max + kDispatchTolerance) continue;
      std::vector<double> p(n, 0.0);
      p[m] = companion;
      double rest = demand - companion;
      bool feasible = rest >= -kDispatchTolerance;
      for (std::size_t i = 0; i < k && feasible; ++i) {
        p[i] = std::clamp(rest, 0.0, fleet[i].p_max);
        rest -= p[i];
        if (p[i] < fleet[i].p_min - kDispatchTolerance) feasible = false;
      }
      if (!feasible || rest > kDispatchTolerance) continue;
      const double c = detail::cost_of(fleet, p);
      if (!std::isfinite(best_cost) || c < best_cost - 1e-12 * std::max(1.0, std::abs(best_cost))) {
        best_cost = c;
        r.power = std::move(p);
        // the companion sets the price only when it is strictly inside its range
        r.marginal = companion > fleet[m].p_min + kDispatchTolerance ? m : k - 1;
      }
    }
    if (!std::isfinite(best_cost)) {
      throw InfeasibleError("no back-down allocation for demand " + std::to_string(demand) + " MW", demand,
                            fleet.total_capacity());
    }
  }
  r.clearing_price = fleet[r.marginal].ask_price;
  detail::fill_multipliers(fleet, r);
  return r;
}

/// Back-down check: with 0 < demand - sum_{i<k} p_max < p_min_k (k is 0-based
/// here, k >= 1), backing unit k-1 down to make room for unit k at p_min
/// keeps unit k-1 strictly inside its range.
inline bool lemma1_feasibility(const Fleet& fleet, double demand, std::size_t k) {
  if (k < 1 || k >= fleet.size()) throw DomainError("lemma1_feasibility needs 1 <= k < fleet size");
  double before_k = 0.0;
  for (std::size_t i = 0; i < k; ++i) before_k += fleet[i].p_max;
  const double residual = demand - before_k;
  if (!(residual > 0.0 && residual < fleet[k].p_min)) {
    throw DomainError("lemma1_feasibility precondition 0 < residual < p_min_k does not hold");
  }
  const double backed_down = demand - (before_k - fleet[k - 1].p_max) - fleet[k].p_min;
  return fleet[k - 1].p_min < backed_down && backed_down < fleet[k - 1].p_max;
}

struct KktReport {
  double stationarity = 0.0;
  double balance = 0.0;
  double primal_feasibility = 0.0;
  double complementarity = 0.0;
  double nonnegativity = 0.0;
  /// only populated for network problems
  double angle_stationarity = 0.0;

  double max() const noexcept {
    return std::max({stationarity, balance, primal_feasibility, complementarity, nonnegativity, angle_stationarity});
  }
};

/// Residuals of the optimality system for the uncongested commitment:
/// pi_i - lambda + mu_i - mubar_i = 0, sum p = demand, bounds,
/// complementary slackness and multiplier signs.
inline KktReport kkt_residuals_p2(const Fleet& fleet, const DispatchResult& result, double demand) {
  KktReport rep;
  if (result.power.size() != fleet.size() || result.mu_upper.size() != fleet.size() ||
      result.mu_lower.size() != fleet.size()) {
    throw DomainError("dispatch result does not match the fleet size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const auto& g = fleet[i];
    const double p = result.power[i];
    const double mu = result.mu_upper[i];
    const double mubar = result.mu_lower[i];
    const bool off = detail::is_off(g, p);
    const double lo = off ? 0.0 : g.p_min;
    const double hi = off ? 0.0 : g.p_max;
    total += p;
    rep.stationarity = std::max(rep.stationarity, std::abs(g.ask_price - result.clearing_price + mu - mubar));
    rep.primal_feasibility = std::max({rep.primal_feasibility, lo - p, p - hi});
    rep.complementarity = std::max({rep.complementarity, std::abs(mu * (p - hi)), std::abs(mubar * (lo - p))});
    rep.nonnegativity = std::max({rep.nonnegativity, -mu, -mubar});
  }
  rep.balance = std::abs(total - demand);
  return rep;
}

}  // namespace gridclear
