#pragma once

// Empirical value-at-risk and conditional value-at-risk on finite weighted
// samples. Everything here is exact on the discrete distribution: no
// interpolation between atoms and no kernel smoothing.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gridclear/errors.hpp"

namespace gridclear {

/// Confidence level, strictly inside (0, 1).
class RiskLevel {
 public:
  explicit RiskLevel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw DomainError("risk level must lie in (0,1), got " + std::to_string(alpha));
    }
  }

  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// A scalar random variable given by finitely many atoms.
///
/// Construction merges equal values, sorts ascending and renormalizes the
/// weights so they sum to one exactly (up to rounding). Input weights must be
/// strictly positive and already sum to one within 1e-9.
class EmpiricalSample {
 public:
  struct Point {
    double value;
    double probability;
  };

  explicit EmpiricalSample(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw DomainError("empirical sample needs at least one point");
    double total = 0.0;
    for (const auto& p : points_) {
      if (!std::isfinite(p.value)) throw DomainError("sample value is not finite");
      if (!(p.probability > 0.0)) throw DomainError("sample probabilities must be strictly positive");
      total += p.probability;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw DomainError("sample probabilities sum to " + std::to_string(total) + ", expected 1");
    }
    std::sort(points_.begin(), points_.end(),
              [](const Point& a, const Point& b) { return a.value < b.value; });
    std::vector<Point> merged;
    merged.reserve(points_.size());
    for (const auto& p : points_) {
      if (!merged.empty() && merged.back().value == p.value) {
        merged.back().probability += p.probability;
      } else {
        merged.push_back(p);
      }
    }
    for (auto& p : merged) p.probability /= total;
    points_ = std::move(merged);
  }

  /// Equally weighted sample of the given values.
  static EmpiricalSample uniform(std::span<const double> values) {
    if (values.empty()) throw DomainError("empirical sample needs at least one point");
    const double w = 1.0 / static_cast<double>(values.size());
    std::vector<Point> pts;
    pts.reserve(values.size());
    for (double v : values) pts.push_back({v, w});
    return EmpiricalSample(std::move(pts));
  }

  static EmpiricalSample weighted(std::span<const double> values, std::span<const double> probabilities) {
    if (values.size() != probabilities.size()) {
      throw DomainError("values and probabilities differ in length");
    }
    std::vector<Point> pts;
    pts.reserve(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) pts.push_back({values[j], probabilities[j]});
    return EmpiricalSample(std::move(pts));
  }

  static EmpiricalSample point_mass(double value) { return EmpiricalSample({{value, 1.0}}); }

  const std::vector<Point>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double min() const noexcept { return points_.front().value; }
  double max() const noexcept { return points_.back().value; }

  double mean() const noexcept {
    double m = 0.0;
    for (const auto& p : points_) m += p.value * p.probability;
    return m;
  }

 private:
  std::vector<Point> points_;
};

namespace detail {

// slack on CDF comparisons against alpha
inline constexpr double kCdfSlack = 1e-12;

inline std::size_t var_index(const EmpiricalSample& sample, double alpha) {
  const auto& pts = sample.points();
  double cdf = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    cdf += pts[j].probability;
    if (cdf >= alpha - kCdfSlack) return j;
  }
  return pts.size() - 1;
}

}  // namespace detail

/// Smallest atom z with F(z) >= alpha.
inline double value_at_risk(const EmpiricalSample& sample, RiskLevel alpha) {
  return sample.points()[detail::var_index(sample, alpha.value())].value;
}

/// Tail expectation under the rescaled CDF (F(z) - alpha) / (1 - alpha): the
/// atom at VaR keeps the part of its mass above alpha, atoms beyond keep all
/// of theirs.
inline double cvar_direct(const EmpiricalSample& sample, RiskLevel alpha) {
  const double a = alpha.value();
  const auto& pts = sample.points();
  const std::size_t j = detail::var_index(sample, a);
  double cdf = 0.0;
  for (std::size_t i = 0; i <= j; ++i) cdf += pts[i].probability;
  const double base = pts[j].value;
  double weight = std::max(0.0, cdf - a);
  double excess = 0.0;
  for (std::size_t i = j + 1; i < pts.size(); ++i) {
    excess += (pts[i].value - base) * pts[i].probability;
    weight += pts[i].probability;
  }
  return weight > 0.0 ? base + excess / weight : base;
}

/// eta + E[(X - eta)^+] / (1 - alpha)
inline double rockafellar_objective(const EmpiricalSample& sample, RiskLevel alpha, double eta) {
  double excess = 0.0;
  for (const auto& p : sample.points()) excess += p.probability * std::max(p.value - eta, 0.0);
  return eta + excess / (1.0 - alpha.value());
}

/// Minimization form of CVaR, evaluated at its minimizer eta = VaR.
inline double cvar_rockafellar(const EmpiricalSample& sample, RiskLevel alpha) {
  return rockafellar_objective(sample, alpha, value_at_risk(sample, alpha));
}

/// Residual shortfall risk CVaR(n) = (CVaR(sum s) - committed)^+ left after
/// committing `total_committed` MW against the aggregate net load.
inline double committed_requirement(const EmpiricalSample& aggregate_net_load, RiskLevel alpha,
                                    double total_committed) {
  if (!(total_committed >= 0.0)) throw DomainError("committed power must be non-negative");
  return std::max(0.0, cvar_direct(aggregate_net_load, alpha) - total_committed);
}

/// sum_i CVaR(X_i) - CVaR(sum_i X_i). The joint sample must be the law of the
/// scenario-wise sum of the marginals.
inline double subadditivity_gap(std::span<const EmpiricalSample> per_bus, const EmpiricalSample& joint,
                                RiskLevel alpha) {
  double sum = 0.0;
  for (const auto& s : per_bus) sum += cvar_direct(s, alpha);
  return sum - cvar_direct(joint, alpha);
}

}  // namespace gridclear
