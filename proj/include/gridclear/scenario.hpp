#pragma once

// Monte Carlo contingency scenarios for bus loads and renewable output.
//
// Loads are Gaussian truncated at zero. Renewable output at bus i is
// w_i * X with X ~ Beta on [0,1]; the mean of X makes expected
// renewable energy `penetration` times expected load, and its standard
// deviation per unit capacity grows with the installed capacity relative to
// mean system load. By default all buses share one weather draw per hour and
// scenario (comonotone output).

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gridclear/errors.hpp"
#include "gridclear/risk.hpp"

namespace gridclear {

struct ScenarioConfig {
  int n_buses = 1;
  int horizon = 1;
  int n_scenarios = 1;
  std::uint64_t seed = 0;
  /// [bus][hour], MW
  std::vector<std::vector<double>> load_mean;
  std::vector<std::vector<double>> load_std;
  /// installed renewable capacity per bus, MW
  std::vector<double> renewable_capacity;
  /// mean renewable energy as a fraction of mean load
  double penetration = 0.0;
  double uncertainty_growth = 0.0;
  bool common_weather = true;

  void validate() const {
    if (n_buses < 1) throw ConfigError("n_buses must be >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (n_scenarios < 1) throw ConfigError("n_scenarios must be >= 1");
    auto check_grid = [&](const std::vector<std::vector<double>>& g, const char* name) {
      if (static_cast<int>(g.size()) != n_buses) throw ConfigError(std::string(name) + " must have one row per bus");
      for (int i = 0; i < n_buses; ++i) {
        if (static_cast<int>(g[i].size()) != horizon) {
          throw ConfigError(std::string(name) + " row for bus " + std::to_string(i + 1) + " must have one entry per hour");
        }
        for (double v : g[i]) {
          if (!(v >= 0.0)) throw ConfigError(std::string(name) + " at bus " + std::to_string(i + 1) + " must be >= 0");
        }
      }
    };
    check_grid(load_mean, "load_mean");
    check_grid(load_std, "load_std");
    if (static_cast<int>(renewable_capacity.size()) != n_buses) {
      throw ConfigError("renewable_capacity must have one entry per bus");
    }
    for (int i = 0; i < n_buses; ++i) {
      if (!(renewable_capacity[i] >= 0.0)) {
        throw ConfigError("renewable capacity at bus " + std::to_string(i + 1) + " must be >= 0");
      }
    }
    if (!(penetration >= 0.0)) throw ConfigError("penetration must be >= 0");
    if (!(uncertainty_growth >= 0.0)) throw ConfigError("uncertainty_growth must be >= 0");
  }
};

/// K joint load/renewable trajectories with scenario probabilities.
class ScenarioSet {
 public:
  ScenarioSet(int n_buses, int horizon, std::vector<double> probabilities, std::vector<double> load,
              std::vector<double> renewable, std::vector<double> capacity)
      : n_buses_(n_buses),
        horizon_(horizon),
        probabilities_(std::move(probabilities)),
        load_(std::move(load)),
        renewable_(std::move(renewable)),
        capacity_(std::move(capacity)) {
    const std::size_t k = probabilities_.size();
    if (n_buses_ < 1 || horizon_ < 1 || k == 0) throw DomainError("scenario set dimensions must be positive");
    const std::size_t cells = static_cast<std::size_t>(n_buses_) * horizon_ * k;
    if (load_.size() != cells || renewable_.size() != cells || capacity_.size() != static_cast<std::size_t>(n_buses_)) {
      throw DomainError("scenario arrays do not match the declared dimensions");
    }
    double total = 0.0;
    for (double p : probabilities_) {
      if (!(p > 0.0)) throw DomainError("scenario probabilities must be strictly positive");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("scenario probabilities must sum to 1");
    for (int i = 0; i < n_buses_; ++i) {
      for (int t = 0; t < horizon_; ++t) {
        for (std::size_t s = 0; s < k; ++s) {
          const double d = load_[offset(i, t, s)];
          const double r = renewable_[offset(i, t, s)];
          if (!(d >= 0.0)) throw DomainError("scenario load must be non-negative");
          if (!(r >= 0.0 && r <= capacity_[i])) throw DomainError("renewable output outside [0, capacity]");
        }
      }
    }
  }

  int n_buses() const noexcept { return n_buses_; }
  int horizon() const noexcept { return horizon_; }
  int n_scenarios() const noexcept { return static_cast<int>(probabilities_.size()); }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }
  double capacity(int bus) const { return capacity_.at(bus); }

  double load(int bus, int t, int k) const { return load_[checked(bus, t, k)]; }
  double renewable(int bus, int t, int k) const { return renewable_[checked(bus, t, k)]; }
  double net(int bus, int t, int k) const { return load(bus, t, k) - renewable(bus, t, k); }

  bool operator==(const ScenarioSet&) const = default;

 private:
  std::size_t offset(int bus, int t, std::size_t k) const {
    return (static_cast<std::size_t>(bus) * horizon_ + t) * probabilities_.size() + k;
  }

  std::size_t checked(int bus, int t, int k) const {
    if (bus < 0 || bus >= n_buses_ || t < 0 || t >= horizon_ || k < 0 || k >= n_scenarios()) {
      throw DomainError("scenario index out of range");
    }
    return offset(bus, t, static_cast<std::size_t>(k));
  }

  int n_buses_;
  int horizon_;
  std::vector<double> probabilities_;
  std::vector<double> load_;
  std::vector<double> renewable_;
  std::vector<double> capacity_;
};

namespace detail {

struct BetaShape {
  double mean_fraction;  // E[X]
  double a;
  double b;  // a == 0 means X is deterministic at mean_fraction
};

// fraction of the largest admissible std sqrt(m(1-m))
inline constexpr double kBetaStdCeiling = 0.98;

inline BetaShape beta_shape(double mean_fraction, double rel_std) {
  if (mean_fraction <= 0.0 || mean_fraction >= 1.0 || rel_std <= 0.0) return {mean_fraction, 0.0, 0.0};
  const double ceiling = kBetaStdCeiling * std::sqrt(mean_fraction * (1.0 - mean_fraction));
  const double s = std::min(rel_std, ceiling);
  const double c = mean_fraction * (1.0 - mean_fraction) / (s * s) - 1.0;
  return {mean_fraction, mean_fraction * c, (1.0 - mean_fraction) * c};
}

inline double beta_quantile(const BetaShape& shape, double u) {
  if (shape.a == 0.0) return std::clamp(shape.mean_fraction, 0.0, 1.0);
  return boost::math::ibeta_inv(shape.a, shape.b, u);
}

}  // namespace detail

inline ScenarioSet generate_scenarios(const ScenarioConfig& config) {
  config.validate();
  const int n = config.n_buses;
  const int T = config.horizon;
  const int K = config.n_scenarios;

  double total_capacity = 0.0;
  for (double w : config.renewable_capacity) total_capacity += w;
  double mean_system_load = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) mean_system_load += config.load_mean[i][t];
  }
  mean_system_load /= T;

  // std per unit capacity
  const double rel_std = mean_system_load > 0.0
                             ? config.uncertainty_growth * total_capacity / mean_system_load
                             : 0.0;

  // shapes[t][i]
  std::vector<std::vector<detail::BetaShape>> shapes(T, std::vector<detail::BetaShape>(n, {0.0, 0.0, 0.0}));
  for (int t = 0; t < T; ++t) {
    double hour_load = 0.0;
    for (int i = 0; i < n; ++i) hour_load += config.load_mean[i][t];
    const double target = config.penetration * hour_load;
    if (target <= 0.0 || total_capacity <= 0.0) continue;
    // common mean capacity factor across buses
    const double fraction = target / total_capacity;
    for (int i = 0; i < n; ++i) {
      if (config.renewable_capacity[i] <= 0.0) continue;
      if (fraction > 1.0) {
        throw ConfigError("bus " + std::to_string(i + 1) + ": mean renewable output " +
                          std::to_string(fraction * config.renewable_capacity[i]) + " MW exceeds capacity " +
                          std::to_string(config.renewable_capacity[i]) + " MW at hour " + std::to_string(t + 1));
      }
      shapes[t][i] = detail::beta_shape(fraction, rel_std);
    }
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t cells = static_cast<std::size_t>(n) * T * K;
  std::vector<double> load(cells, 0.0);
  std::vector<double> renewable(cells, 0.0);
  auto at = [&](int i, int t, int k) { return (static_cast<std::size_t>(i) * T + t) * K + k; };

  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      const double weather = unit(rng);
      for (int i = 0; i < n; ++i) {
        const double mu = config.load_mean[i][t];
        const double sd = config.load_std[i][t];
        double d = mu;
        if (sd > 0.0) {
          // truncate at zero by rejection
          d = -1.0;
          for (int attempt = 0; attempt < 64 && d < 0.0; ++attempt) d = mu + sd * gauss(rng);
          d = std::max(d, 0.0);
        }
        const double u = config.common_weather ? weather : unit(rng);
        const double w = config.renewable_capacity[i];
        const double r = w > 0.0 ? std::clamp(w * detail::beta_quantile(shapes[t][i], u), 0.0, w) : 0.0;
        load[at(i, t, k)] = d;
        renewable[at(i, t, k)] = r;
      }
    }
  }
  std::vector<double> probabilities(K, 1.0 / K);
  double sum = 0.0;
  for (double p : probabilities) sum += p;
  probabilities.back() += 1.0 - sum;
  return ScenarioSet(n, T, std::move(probabilities), std::move(load), std::move(renewable),
                     config.renewable_capacity);
}

/// Law of s_i^t = p_d - p_r at one bus. Negative values (local surplus) stay.
inline EmpiricalSample net_load(const ScenarioSet& set, int bus, int t) {
  if (bus < 0 || bus >= set.n_buses() || t < 0 || t >= set.horizon()) throw DomainError("net_load index out of range");
  std::vector<EmpiricalSample::Point> pts;
  pts.reserve(set.n_scenarios());
  for (int k = 0; k < set.n_scenarios(); ++k) pts.push_back({set.net(bus, t, k), set.probabilities()[k]});
  return EmpiricalSample(std::move(pts));
}

/// Law of sum_{i >= first_bus} s_i^t, summed scenario by scenario.
inline EmpiricalSample suffix_net_load(const ScenarioSet& set, int first_bus, int t) {
  if (first_bus < 0 || first_bus >= set.n_buses() || t < 0 || t >= set.horizon()) {
    throw DomainError("suffix_net_load index out of range");
  }
  std::vector<EmpiricalSample::Point> pts;
  pts.reserve(set.n_scenarios());
  for (int k = 0; k < set.n_scenarios(); ++k) {
    double s = 0.0;
    for (int i = first_bus; i < set.n_buses(); ++i) s += set.net(i, t, k);
    pts.push_back({s, set.probabilities()[k]});
  }
  return EmpiricalSample(std::move(pts));
}

inline EmpiricalSample aggregate_net_load(const ScenarioSet& set, int t) {
  if (t < 0 || t >= set.horizon()) throw DomainError("aggregate_net_load hour out of range");
  return suffix_net_load(set, 0, t);
}

/// CSV dump: scenario,bus,time,load_mw,renewable_mw,probability (1-based
/// indices).
inline void write_scenarios_csv(const ScenarioSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "scenario,bus,time,load_mw,renewable_mw,probability\n";
  char buf[160];
  for (int k = 0; k < set.n_scenarios(); ++k) {
    for (int i = 0; i < set.n_buses(); ++i) {
      for (int t = 0; t < set.horizon(); ++t) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.6f,%.6f,%.12f\n", k + 1, i + 1, t + 1, set.load(i, t, k),
                      set.renewable(i, t, k), set.probabilities()[k]);
        out << buf;
      }
    }
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace gridclear
