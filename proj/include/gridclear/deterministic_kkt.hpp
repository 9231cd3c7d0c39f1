#pragma once

// Deterministic DC dispatch on the radial feeder and an optimality
// certificate checker that works on any line list.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gridclear/errors.hpp"
#include "gridclear/fleet.hpp"
#include "gridclear/merit_order.hpp"
#include "gridclear/radial_dispatch.hpp"

namespace gridclear {

struct Line {
  std::size_t from;
  std::size_t to;
  double susceptance;  // flow = b (theta_from - theta_to)
  double limit;        // applies in both directions
};

struct Network {
  std::size_t n_buses = 0;
  std::vector<Line> lines;

  static Network from_radial(const RadialGrid& grid) {
    Network net;
    net.n_buses = static_cast<std::size_t>(grid.n_buses);
    for (std::size_t i = 0; i + 1 < net.n_buses; ++i) {
      net.lines.push_back({i, i + 1, grid.susceptance[i], grid.line_limit});
    }
    return net;
  }
};

/// Primal and dual solution. Line multipliers are per direction:
/// line_mu_forward for flow from -> to at +limit, line_mu_backward for the
/// reverse direction.
struct OpfSolution {
  std::vector<double> power;
  std::vector<double> angles;
  std::vector<double> lmp;
  std::vector<double> mu_upper;
  std::vector<double> mu_lower;
  std::vector<double> line_mu_forward;
  std::vector<double> line_mu_backward;
  std::vector<double> flows;
  double objective = 0.0;  // includes the constant renewable term
};

inline OpfSolution solve_deterministic(const RadialGrid& grid, const Fleet& fleet, std::span<const double> loads,
                                       std::span<const double> renewables) {
  grid.validate();
  const auto n = static_cast<std::size_t>(grid.n_buses);
  if (fleet.size() != n || loads.size() != n || renewables.size() != n) {
    throw ConfigError("deterministic dispatch needs one generator, load and renewable value per bus");
  }
  std::vector<double> net(n), suffix(n);
  for (std::size_t i = 0; i < n; ++i) net[i] = loads[i] - renewables[i];
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += net[i];
    suffix[i] = acc;
  }
  const CongestedDispatch d = dispatch_radial(grid, fleet, net, suffix);

  OpfSolution s;
  s.power = d.power;
  s.lmp = d.lmp;
  s.flows.assign(n > 0 ? n - 1 : 0, 0.0);
  s.angles.assign(n, 0.0);
  double carried = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    carried += s.power[i] - net[i];
    if (i + 1 == n) break;
    s.flows[i] = carried;
    if (std::abs(carried) > grid.line_limit + kRadialTolerance) {
      throw InfeasibleError("line " + std::to_string(i + 1) + "-" + std::to_string(i + 2) + " would carry " +
                                std::to_string(carried) + " MW over its limit " + std::to_string(grid.line_limit),
                            suffix[0], fleet.total_capacity());
    }
    s.angles[i + 1] = s.angles[i] - carried / grid.susceptance[i];
  }
  if (std::abs(carried) > kRadialTolerance * std::max(1.0, std::abs(suffix[0]))) {
    throw InfeasibleError("renewable surplus of " + std::to_string(-carried) + " MW cannot be absorbed", suffix[0],
                          fleet.total_capacity());
  }

  s.mu_upper.assign(n, 0.0);
  s.mu_lower.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = fleet[i];
    const double gap = s.lmp[i] - g.ask_price;
    const bool at_upper = s.power[i] >= g.p_max - kDispatchTolerance;
    const bool at_lower = s.power[i] <= g.p_min + kDispatchTolerance;
    if (gap > 0.0 && at_upper) s.mu_upper[i] = gap;
    if (gap < 0.0 && at_lower) s.mu_lower[i] = -gap;
  }
  // angle stationarity on a chain: each line carries exactly the LMP jump
  s.line_mu_forward.assign(s.flows.size(), 0.0);
  s.line_mu_backward.assign(s.flows.size(), 0.0);
  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    const double jump = s.lmp[i + 1] - s.lmp[i];
    s.line_mu_forward[i] = std::max(jump, 0.0);
    s.line_mu_backward[i] = std::max(-jump, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) s.objective += fleet[i].ask_price * s.power[i] + fleet.renewable_price() * renewables[i];
  return s;
}

/// Residuals of the full optimality system: generator stationarity, angle
/// stationarity, nodal balance, line and box feasibility, complementary
/// slackness and multiplier signs.
inline KktReport kkt_verify_p1(const OpfSolution& s, const Network& net, const Fleet& fleet,
                               std::span<const double> loads, std::span<const double> renewables) {
  const std::size_t n = net.n_buses;
  const std::size_t m = net.lines.size();
  if (fleet.size() != n || loads.size() != n || renewables.size() != n || s.power.size() != n ||
      s.angles.size() != n || s.lmp.size() != n || s.mu_upper.size() != n || s.mu_lower.size() != n ||
      s.line_mu_forward.size() != m || s.line_mu_backward.size() != m) {
    throw DomainError("solution, network and inputs disagree in size");
  }
  KktReport rep;
  std::vector<double> injection(n, 0.0);
  std::vector<double> angle_term(n, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    const auto& ln = net.lines[l];
    if (ln.from >= n || ln.to >= n) throw DomainError("line endpoint out of range");
    const double flow = ln.susceptance * (s.angles[ln.from] - s.angles[ln.to]);
    injection[ln.from] += flow;
    injection[ln.to] -= flow;
    const double fwd = s.line_mu_forward[l];
    const double bwd = s.line_mu_backward[l];
    const double dl = s.lmp[ln.from] - s.lmp[ln.to];
    angle_term[ln.from] += ln.susceptance * (fwd - bwd + dl);
    angle_term[ln.to] += ln.susceptance * (bwd - fwd - dl);
    rep.primal_feasibility = std::max({rep.primal_feasibility, flow - ln.limit, -flow - ln.limit});
    if (std::isfinite(ln.limit)) {
      rep.complementarity = std::max({rep.complementarity, std::abs(fwd * (flow - ln.limit)),
                                      std::abs(bwd * (-flow - ln.limit))});
    } else {
      rep.complementarity = std::max({rep.complementarity, std::abs(fwd), std::abs(bwd)});
    }
    rep.nonnegativity = std::max({rep.nonnegativity, -fwd, -bwd});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = fleet[i];
    const double p = s.power[i];
    const double mu = s.mu_upper[i];
    const double mubar = s.mu_lower[i];
    rep.stationarity = std::max(rep.stationarity, std::abs(g.ask_price - s.lmp[i] + mu - mubar));
    rep.angle_stationarity = std::max(rep.angle_stationarity, std::abs(angle_term[i]));
    rep.balance = std::max(rep.balance, std::abs(p + renewables[i] - loads[i] - injection[i]));
    rep.primal_feasibility = std::max({rep.primal_feasibility, g.p_min - p, p - g.p_max});
    rep.complementarity = std::max({rep.complementarity, std::abs(mu * (p - g.p_max)), std::abs(mubar * (g.p_min - p))});
    rep.nonnegativity = std::max({rep.nonnegativity, -mu, -mubar});
  }
  return rep;
}

}  // namespace gridclear
