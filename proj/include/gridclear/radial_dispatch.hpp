#pragma once

// Risk-based dispatch on a radial feeder with one generator per bus and a
// uniform line limit. Bus 1 hosts the cheapest unit; each stage supplies as
// much of the remaining requirement as the outgoing line allows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gridclear/errors.hpp"
#include "gridclear/fleet.hpp"

namespace gridclear {

/// Buses 0..n-1 in a chain; line i connects bus i to bus i+1.
struct RadialGrid {
  int n_buses = 1;
  double line_limit = std::numeric_limits<double>::infinity();  // MW, same for every line
  std::vector<double> susceptance;                              // per line, per unit on a 1 MW base

  RadialGrid() = default;
  RadialGrid(int n, double limit, double b = 10.0)
      : n_buses(n), line_limit(limit), susceptance(n > 1 ? n - 1 : 0, b) {
    validate();
  }

  void validate() const {
    if (n_buses < 1) throw ConfigError("radial grid needs at least one bus");
    if (!(line_limit > 0.0)) throw ConfigError("line limit must be positive");
    if (static_cast<int>(susceptance.size()) != n_buses - 1) {
      throw ConfigError("radial grid needs one susceptance per line");
    }
    for (double b : susceptance) {
      if (!(b > 0.0 && std::isfinite(b))) throw ConfigError("line susceptance must be positive and finite");
    }
  }
};

enum class StageCase {
  kServesRest,  // the stage covers everything still required downstream
  kCongested    // the outgoing line runs at its limit
};

struct CongestedDispatch {
  std::vector<double> power;                 // MW per bus
  std::vector<double> lmp;                   // $/MWh per bus
  std::vector<double> local_requirement;     // requirement of bus i alone, given upstream dispatch
  std::vector<double> remaining_requirement; // requirement of buses i..N, given upstream dispatch
  std::vector<StageCase> stage;
  bool congested = false;
  std::size_t balancing_bus = 0;  // 0-based bus whose ask sets the downstream LMP

  double total() const noexcept {
    double s = 0.0;
    for (double p : power) s += p;
    return s;
  }
};

struct RadialViolation {
  std::size_t bus;
  std::string message;
};

inline constexpr double kRadialTolerance = 1e-9;

/// Every unit must have p_min = 0 and be able to cover the CVaR of its own
/// bus plus everything downstream.
inline std::vector<RadialViolation> validate_assumption3(const RadialGrid& grid, const Fleet& fleet,
                                                         std::span<const double> per_bus_cvars,
                                                         std::span<const double> suffix_cvars) {
  std::vector<RadialViolation> out;
  const auto n = static_cast<std::size_t>(grid.n_buses);
  if (fleet.size() != n || per_bus_cvars.size() != n || suffix_cvars.size() != n) {
    out.push_back({0, "grid, fleet and CVaR vectors must all have one entry per bus"});
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (fleet[i].p_min != 0.0) {
      out.push_back({i, "bus " + std::to_string(i + 1) + ": p_min must be 0, got " + std::to_string(fleet[i].p_min)});
    }
    if (suffix_cvars[i] > fleet[i].p_max + kRadialTolerance) {
      out.push_back({i, "bus " + std::to_string(i + 1) + ": downstream requirement " + std::to_string(suffix_cvars[i]) +
                            " MW exceeds p_max " + std::to_string(fleet[i].p_max) + " MW"});
    }
  }
  return out;
}

namespace detail {

/// The stage recursion without assumption checks; also used to re-dispatch
/// realized scenarios, which may sit outside the committed envelope.
inline CongestedDispatch radial_allocation(double line_limit, std::span<const double> per_bus,
                                           std::span<const double> suffix) {
  const std::size_t n = per_bus.size();
  CongestedDispatch d;
  d.power.assign(n, 0.0);
  d.local_requirement.assign(n, 0.0);
  d.remaining_requirement.assign(n, 0.0);
  d.stage.assign(n, StageCase::kServesRest);
  double local = per_bus[0];
  double remaining = std::max(0.0, suffix[0]);
  for (std::size_t i = 0; i < n; ++i) {
    d.local_requirement[i] = local;
    d.remaining_requirement[i] = remaining;
    const double p = std::max(0.0, std::min(local + line_limit, remaining));
    d.power[i] = p;
    if (p >= remaining - kRadialTolerance || i + 1 == n) {
      d.stage[i] = StageCase::kServesRest;
      local = 0.0;
      remaining = 0.0;
    } else {
      d.stage[i] = StageCase::kCongested;
      local = per_bus[i + 1] - line_limit;
      remaining = std::max(0.0, suffix[i + 1] - line_limit);
    }
  }
  return d;
}

}  // namespace detail

/// Planned power per bus and LMPs. Uncongested (suffix_1 <= CVaR_1 + limit):
/// bus 1 serves all and every LMP is pi_1. Congested: LMP_i = pi_i before the
/// balancing bus k and pi_k from k on, where k is the first bus whose own
/// suffix exceeds the limit while the suffix after it does not.
inline CongestedDispatch dispatch_radial(const RadialGrid& grid, const Fleet& fleet,
                                         std::span<const double> per_bus_cvars, std::span<const double> suffix_cvars) {
  grid.validate();
  const auto violations = validate_assumption3(grid, fleet, per_bus_cvars, suffix_cvars);
  if (!violations.empty()) {
    std::string msg = "radial dispatch infeasible:";
    for (const auto& v : violations) msg += " " + v.message + ";";
    throw InfeasibleError(msg, suffix_cvars.empty() ? 0.0 : suffix_cvars[0], fleet.total_capacity());
  }
  const std::size_t n = per_bus_cvars.size();
  const double limit = grid.line_limit;
  auto d = detail::radial_allocation(limit, per_bus_cvars, suffix_cvars);

  d.lmp.assign(n, fleet[0].ask_price);
  d.congested = n > 1 && suffix_cvars[0] > per_bus_cvars[0] + limit;
  if (d.congested) {
    std::size_t k = n - 1;
    for (std::size_t i = 1; i < n; ++i) {
      const double after = i + 1 < n ? suffix_cvars[i + 1] : 0.0;
      if (suffix_cvars[i] > limit && after <= limit) {
        k = i;
        break;
      }
    }
    d.balancing_bus = k;
    for (std::size_t i = 0; i < n; ++i) d.lmp[i] = fleet[std::min(i, k)].ask_price;
  }
  return d;
}

struct UpperBound {
  double bound;  // sum of per-bus CVaRs
  double gap;    // bound minus joint CVaR; >= 0 by subadditivity
};

inline UpperBound committed_upper_bound(std::span<const double> per_bus_cvars, double joint_cvar) {
  double s = 0.0;
  for (double c : per_bus_cvars) s += c;
  return {s, s - joint_cvar};
}

}  // namespace gridclear
