// Randomized invariants with hand-rolled generators (fixed seeds).

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "gridclear/gridclear.hpp"
#include "oracles.hpp"

using namespace gridclear;

TEST(RiskProperties, DirectAgreesWithRockafellarAndOracle) {
  gen::Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto atoms = gen::atoms(rng, 50);
    const auto s = gen::sample_of(atoms);
    const RiskLevel a(rng.uniform(0.01, 0.99));
    const double direct = cvar_direct(s, a);
    ASSERT_NEAR(direct, cvar_rockafellar(s, a), 1e-9);
    ASSERT_NEAR(direct, oracle::cvar_quantile_integral(atoms, a.value()), 1e-9);
    ASSERT_EQ(value_at_risk(s, a), oracle::var_scan(atoms, a.value()));
    ASSERT_GE(direct, value_at_risk(s, a) - 1e-9);
  }
}

TEST(RiskProperties, TranslationHomogeneityMonotonicity) {
  gen::Rng rng(102);
  for (int trial = 0; trial < 1000; ++trial) {
    auto atoms = gen::atoms(rng, 30);
    const auto s = gen::sample_of(atoms);
    const double a1 = rng.uniform(0.01, 0.98);
    const double a2 = rng.uniform(a1, 0.99);
    const double c = rng.uniform(-50, 50), lam = rng.uniform(0.1, 5);
    auto shifted = atoms, scaled = atoms;
    for (auto& x : shifted) x.value += c;
    for (auto& x : scaled) x.value *= lam;
    const double base = cvar_direct(s, RiskLevel(a1));
    ASSERT_NEAR(cvar_direct(gen::sample_of(shifted), RiskLevel(a1)), base + c, 1e-9);
    ASSERT_NEAR(cvar_direct(gen::sample_of(scaled), RiskLevel(a1)), lam * base, 1e-9 * std::max(1.0, std::abs(base)));
    ASSERT_LE(base, cvar_direct(s, RiskLevel(a2)) + 1e-12);
  }
}

TEST(RiskProperties, SubadditivityOnScenarioSets) {
  gen::Rng rng(103);
  for (int trial = 0; trial < 300; ++trial) {
    const int buses = rng.integer(1, 4);
    const auto set = gen::scenario_set(rng, buses, rng.integer(1, 40));
    std::vector<EmpiricalSample> parts;
    for (int b = 0; b < buses; ++b) parts.push_back(net_load(set, b, 0));
    const RiskLevel a(rng.uniform(0.01, 0.99));
    ASSERT_GE(subadditivity_gap(parts, aggregate_net_load(set, 0), a), -1e-9);
  }
}

TEST(RiskProperties, RockafellarMinimizerNonNegativeForNonNegativeSamples) {
  gen::Rng rng(104);
  for (int trial = 0; trial < 200; ++trial) {
    auto atoms = gen::atoms(rng, 12);
    for (auto& x : atoms) x.value = std::abs(x.value);
    const auto g = oracle::rockafellar_grid(atoms, rng.uniform(0.05, 0.95));
    ASSERT_GE(g.eta, -1e-12);
  }
}

TEST(ScenarioProperties, CapacityBoundsAndAggregation) {
  gen::Rng rng(105);
  for (int trial = 0; trial < 20; ++trial) {
    ScenarioConfig c;
    c.n_buses = rng.integer(1, 4);
    c.horizon = rng.integer(1, 3);
    c.n_scenarios = rng.integer(1, 10);
    c.seed = static_cast<std::uint64_t>(trial);
    c.load_mean.assign(c.n_buses, std::vector<double>(c.horizon, rng.uniform(10, 200)));
    c.load_std.assign(c.n_buses, std::vector<double>(c.horizon, rng.uniform(0, 30)));
    c.renewable_capacity.assign(c.n_buses, rng.uniform(50, 300));
    c.penetration = rng.uniform(0, 0.5);
    c.uncertainty_growth = rng.uniform(0, 0.3);
    c.common_weather = rng.coin();
    const auto set = generate_scenarios(c);
    for (int t = 0; t < c.horizon; ++t) {
      std::vector<double> sums;
      for (int k = 0; k < c.n_scenarios; ++k) {
        double s = 0.0;
        for (int i = 0; i < c.n_buses; ++i) {
          ASSERT_GE(set.renewable(i, t, k), 0.0);
          ASSERT_LE(set.renewable(i, t, k), c.renewable_capacity[i]);
          ASSERT_GE(set.load(i, t, k), 0.0);
          s += set.net(i, t, k);
        }
        sums.push_back(s);
      }
      const auto agg = aggregate_net_load(set, t);
      const auto expected = EmpiricalSample::weighted(sums, set.probabilities());
      ASSERT_EQ(agg.size(), expected.size());
      for (std::size_t j = 0; j < agg.size(); ++j) {
        ASSERT_EQ(agg.points()[j].value, expected.points()[j].value);
        ASSERT_NEAR(agg.points()[j].probability, expected.points()[j].probability, 1e-15);
      }
    }
  }
}

TEST(ScenarioProperties, MeanNetLoadFallsWithPenetration) {
  RunConfig cfg;
  cfg.n_scenarios = 400;
  double prev = std::numeric_limits<double>::infinity();
  for (double pen = 0.0; pen <= 1.0001; pen += 0.1) {
    const double m = aggregate_net_load(generate_scenarios(scenario_config(cfg, pen)), 0).mean();
    EXPECT_LE(m, prev + 1e-9) << "penetration " << pen;
    prev = m;
  }
}

TEST(MeritOrderProperties, Lemma1UnderAssumption2b) {
  gen::Rng rng(106);
  int hits = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Fleet f = gen::fleet(rng, 4);
    if (f.size() < 2) continue;
    const std::size_t k = static_cast<std::size_t>(rng.integer(1, static_cast<int>(f.size()) - 1));
    if (f[k].p_min <= 0.0) continue;
    double before = 0.0;
    for (std::size_t i = 0; i < k; ++i) before += f[i].p_max;
    const double demand = before + rng.uniform(0.0, f[k].p_min);
    if (!(demand - before > 0.0 && demand - before < f[k].p_min)) continue;
    ASSERT_TRUE(lemma1_feasibility(f, demand, k)) << "trial " << trial;
    ++hits;
  }
  EXPECT_GT(hits, 1000);
}

TEST(RadialProperties, DeterministicBalanceAndLimits) {
  gen::Rng rng(107);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.integer(1, 6);
    const double limit = rng.uniform(5, 120);
    std::vector<double> net(n), suffix(n);
    for (auto& s : net) s = rng.uniform(0, 80);
    double acc = 0.0;
    for (int i = n - 1; i >= 0; --i) suffix[i] = acc += net[i];
    std::vector<GeneratorSpec> units;
    for (int i = 0; i < n; ++i) units.push_back(gen::unit("G" + std::to_string(i), 10.0 + 5 * i, 0, suffix[i] + 50));
    const Fleet f(units);
    const auto d = dispatch_radial(RadialGrid(n, limit), f, net, suffix);
    double carried = 0.0;
    for (int i = 0; i < n; ++i) {
      ASSERT_GE(d.power[i], 0.0);
      carried += d.power[i] - net[i];
      if (i + 1 < n) ASSERT_LE(std::abs(carried), limit + 1e-9) << "trial " << trial;
    }
    ASSERT_NEAR(carried, 0.0, 1e-9);
    ASSERT_LE(d.total(), committed_upper_bound(net, suffix[0]).bound + 1e-9);
    for (int i = 1; i < n; ++i) ASSERT_GE(d.lmp[i], d.lmp[i - 1]);
  }
}

TEST(RadialProperties, StochasticUpperBound) {
  gen::Rng rng(108);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.integer(1, 5);
    // even trials carry no renewables, so every net load is >= 0
    const bool surplus_allowed = trial % 2 == 1;
    const auto set = surplus_allowed ? gen::scenario_set(rng, n, rng.integer(1, 30), 100.0, 60.0)
                                     : gen::scenario_set(rng, n, rng.integer(1, 30), 100.0, 0.0);
    const RiskLevel a(rng.uniform(0.05, 0.99));
    std::vector<double> per(n), suffix(n), per_clamped(n);
    for (int b = 0; b < n; ++b) {
      per[b] = cvar_direct(net_load(set, b, 0), a);
      per_clamped[b] = std::max(0.0, per[b]);
      suffix[b] = cvar_direct(suffix_net_load(set, b, 0), a);
    }
    std::vector<GeneratorSpec> units;
    for (int i = 0; i < n; ++i) {
      units.push_back(gen::unit("G" + std::to_string(i), 10.0 + 5 * i, 0, std::max(0.0, suffix[i]) + 10));
    }
    const auto d = dispatch_radial(RadialGrid(n, rng.uniform(5, 150)), Fleet(units), per, suffix);
    const auto b = committed_upper_bound(per, suffix[0]);
    ASSERT_GE(b.gap, -1e-9);
    if (surplus_allowed) {
      ASSERT_LE(d.total(), committed_upper_bound(per_clamped, suffix[0]).bound + 1e-9) << "trial " << trial;
    } else {
      ASSERT_LE(d.total(), b.bound + 1e-9) << "trial " << trial;
    }
    for (int i = 1; i < n; ++i) ASSERT_GE(d.lmp[i], d.lmp[i - 1]);
  }
}

TEST(KktProperties, CertificateOnRandomFeeders) {
  gen::Rng rng(109);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rng.integer(1, 6);
    std::vector<double> loads(n), ren(n);
    for (int i = 0; i < n; ++i) {
      loads[i] = rng.uniform(0, 80);
      ren[i] = rng.uniform(0, loads[i]);
    }
    double acc = 0.0;
    std::vector<double> suffix(n);
    for (int i = n - 1; i >= 0; --i) suffix[i] = acc += loads[i] - ren[i];
    std::vector<GeneratorSpec> units;
    for (int i = 0; i < n; ++i) units.push_back(gen::unit("G" + std::to_string(i), 10.0 + 5 * i, 0, suffix[i] + rng.uniform(0, 30)));
    const Fleet f(units);
    const RadialGrid grid(n, rng.uniform(5, 150), rng.uniform(1, 20));
    const auto s = solve_deterministic(grid, f, loads, ren);
    ASSERT_LE(kkt_verify_p1(s, Network::from_radial(grid), f, loads, ren).max(), 1e-8) << "trial " << trial;
    bool congested = false;
    for (double fl : s.flows) congested = congested || std::abs(fl) >= grid.line_limit - 1e-9;
    if (!congested) {
      for (double l : s.lmp) ASSERT_EQ(l, s.lmp[0]);
    }
  }
}

TEST(SettlementProperties, IdentitiesAndMonotonicity) {
  gen::Rng rng(110);
  const Fleet f = builtin_fleet();
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = static_cast<std::size_t>(rng.integer(1, 3));
    const int K = rng.integer(1, 5);
    HourlyTable committed(f.size(), std::vector<double>(T)), lmp = committed;
    std::vector<HourlyTable> realized(K, committed);
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t t = 0; t < T; ++t) {
        committed[i][t] = rng.coin(0.3) ? 0.0 : rng.uniform(0, f[i].p_max);
        lmp[i][t] = rng.uniform(0, 300);
        for (int k = 0; k < K; ++k) realized[k][i][t] = rng.uniform(0, committed[i][t]);
      }
    std::vector<double> probs(K, 1.0 / K);
    double s = 0.0;
    for (double p : probs) s += p;
    probs.back() += 1.0 - s;
    const auto costs = CostFunctions::from_fleet(f, rng.uniform(0, 50), rng.uniform(0, 10));
    const auto env = reserve_and_ramp_check(committed, realized, f);
    for (bool cr : {false, true}) {
      Recovery rec;
      try {
        rec = recovery_rate(committed, env, f, costs, cr);
      } catch (const DomainError&) {
        continue;
      }
      if (!cr) ASSERT_EQ(rec.lambda_w, 0.0);
      ASSERT_GE(rec.lambda_w, 0.0);
      const double r = expected_profit(committed, lmp, rec.lambda_w, cr, costs);
      const double rt = realized_profit(realized, probs, lmp, rec.lambda_w, cr, costs);
      ASSERT_EQ(deviation_cost(r, rt), r - rt);
    }
    auto bigger = env;
    for (auto& row : bigger.reserve)
      for (auto& v : row) v += 1.0;
    for (auto& row : bigger.ramp)
      for (auto& v : row) v += 1.0;
    ASSERT_GE(recovery_rate(committed, bigger, f, costs, false).H, recovery_rate(committed, env, f, costs, false).H);
    std::vector<GeneratorSpec> pricier = f.units();
    for (auto& g : pricier) {
      g.no_load_cost += 5;
      g.cold_start += 10;
      g.hot_start += 10;
    }
    ASSERT_GE(recovery_rate(committed, env, Fleet(pricier), costs, false).H,
              recovery_rate(committed, env, f, costs, false).H);
  }
}

TEST(SettlementProperties, RenewableRevenueCappedByLoad) {
  gen::Rng rng(111);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.integer(1, 5);
    std::vector<double> load(n), ren(n), lmp(n, rng.uniform(0, 200));
    double cap = 0.0;
    for (int i = 0; i < n; ++i) {
      load[i] = rng.uniform(0, 100);
      ren[i] = rng.uniform(0, 150);
      cap += lmp[i] * load[i];
    }
    const auto p = curtail_and_pay_renewables(load, ren, lmp);
    ASSERT_LE(p.revenue, cap + 1e-9);
    ASSERT_GE(p.curtailed_mwh, 0.0);
  }
}
