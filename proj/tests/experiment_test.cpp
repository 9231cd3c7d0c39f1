#include <gtest/gtest.h>

#include <sstream>

#include "gridclear/experiment.hpp"

using namespace gridclear;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.n_scenarios = 60;
  return c;
}

std::string csv_text(const CsvTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

}  // namespace

TEST(RunConfig, RejectsEmptyGrids) {
  auto c = small_config();
  c.alphas.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.penetrations.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.alphas = {1.0};
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(AlphaSweep, DeterministicLoadGivesIdenticalRows) {
  auto c = small_config();
  c.alphas = {0.5, 0.9};
  c.model.load_std_fraction = 0.0;
  c.alpha_sweep_penetration = 0.0;
  const auto r = run_alpha_sweep(c, builtin_fleet());
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].committed_total, r.points[1].committed_total);
  EXPECT_EQ(r.points[0].settlement.H, r.points[1].settlement.H);
  EXPECT_EQ(r.points[0].settlement.expected_profit, r.points[1].settlement.expected_profit);
  EXPECT_NEAR(r.points[0].mean_committed(), 650.0, 1e-9);
}

TEST(AlphaSweep, CommittedNonDecreasing) {
  const auto r = run_alpha_sweep(small_config(), builtin_fleet());
  for (std::size_t j = 1; j < r.points.size(); ++j) {
    EXPECT_GE(r.points[j].mean_committed(), r.points[j - 1].mean_committed());
  }
}

TEST(PenetrationSweep, ZeroPenetrationIsPureLoadCvar) {
  auto c = small_config();
  c.penetrations = {0.0};
  const auto r = run_penetration_sweep(c, builtin_fleet());
  ASSERT_EQ(r.points.size(), 1u);
  const auto set = generate_scenarios(scenario_config(c, 0.0));
  std::vector<double> loads;
  for (int k = 0; k < set.n_scenarios(); ++k) {
    double s = 0.0;
    for (int b = 0; b < set.n_buses(); ++b) s += set.load(b, 0, k);
    loads.push_back(s);
  }
  EXPECT_NEAR(r.points[0].mean_committed(), cvar_direct(EmpiricalSample::uniform(loads), RiskLevel(0.9)), 1e-9);
}

TEST(PenetrationSweep, NoGrowthMeansMonotoneDecrease) {
  auto c = small_config();
  c.penetrations = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  c.model.uncertainty_growth = 0.0;
  const auto r = run_penetration_sweep(c, builtin_fleet());
  ASSERT_EQ(r.points.size(), 6u);
  for (std::size_t j = 1; j < r.points.size(); ++j) {
    EXPECT_LE(r.points[j].mean_committed(), r.points[j - 1].mean_committed() + 1e-9);
  }
}

TEST(Sweeps, CommittedMeetsRequirement) {
  auto c = small_config();
  c.horizon = 3;
  const auto r = run_grid(c, builtin_fleet());
  for (const auto& p : r.points) {
    const auto set = generate_scenarios(scenario_config(c, p.penetration));
    for (int t = 0; t < c.horizon; ++t) {
      EXPECT_EQ(committed_requirement(aggregate_net_load(set, t), RiskLevel(p.alpha), p.committed_total[t]), 0.0);
    }
  }
}

TEST(Sweeps, InfeasiblePointIsSkippedWithDiagnostic) {
  auto c = small_config();
  c.model.total_load = 2000.0;  // beyond the 960 MW fleet
  c.alphas = {0.5};
  const auto r = run_alpha_sweep(c, builtin_fleet());
  EXPECT_TRUE(r.points.empty());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_NE(r.diagnostics[0].find("infeasible"), std::string::npos);
}

TEST(Sweeps, RadialNeedsOneGeneratorPerBus) {
  auto c = small_config();
  c.line_limit = 100.0;
  c.model.n_buses = 3;
  c.alphas = {0.9};
  const auto r = run_alpha_sweep(c, builtin_fleet());
  EXPECT_TRUE(r.points.empty());
  EXPECT_EQ(r.diagnostics.size(), 1u);
}

TEST(Sweeps, RadialRun) {
  auto c = small_config();
  c.line_limit = 40.0;
  c.model.n_buses = 3;
  c.model.total_load = 120.0;
  c.alphas = {0.9};
  const Fleet f({[] {
                   GeneratorSpec g;
                   g.name = "A";
                   g.ask_price = 10;
                   g.p_max = 300;
                   g.rp_max = 300;
                   g.ramp_max = 300;
                   g.production_cost_rate = 10;
                   return g;
                 }(),
                 [] {
                   GeneratorSpec g;
                   g.name = "B";
                   g.ask_price = 20;
                   g.p_max = 200;
                   g.rp_max = 200;
                   g.ramp_max = 200;
                   g.production_cost_rate = 20;
                   return g;
                 }(),
                 [] {
                   GeneratorSpec g;
                   g.name = "C";
                   g.ask_price = 30;
                   g.p_max = 100;
                   g.rp_max = 100;
                   g.ramp_max = 100;
                   g.production_cost_rate = 30;
                   return g;
                 }()});
  const auto r = run_alpha_sweep(c, f);
  ASSERT_EQ(r.points.size(), 1u) << (r.diagnostics.empty() ? "" : r.diagnostics[0]);
  const auto& p = r.points[0];
  EXPECT_EQ(p.lmp[0][0], 10);
  EXPECT_EQ(p.lmp[1][0], 20);
  EXPECT_EQ(p.price[0], 20);
  for (const auto& sc : p.realized)
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(sc[i][0], p.committed[i][0]);
}

TEST(Sweeps, EndToEndDeterminism) {
  const auto c = small_config();
  const Fleet f = builtin_fleet();
  EXPECT_EQ(csv_text(penetration_table(run_penetration_sweep(c, f))),
            csv_text(penetration_table(run_penetration_sweep(c, f))));
  const auto a = run_grid(c, f), b = run_grid(c, f);
  EXPECT_EQ(csv_text(settlement_table(a, true)), csv_text(settlement_table(b, true)));
  EXPECT_EQ(csv_text(dispatch_table(a, f)), csv_text(dispatch_table(b, f)));
}

TEST(Sweeps, ZeroRenewableDeterministicRunHasNoDeviation) {
  auto c = small_config();
  c.alphas = {0.9};
  c.model.load_std_fraction = 0.0;
  c.alpha_sweep_penetration = 0.0;
  const auto r = run_alpha_sweep(c, builtin_fleet());
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_EQ(r.points[0].settlement.deviation_cost, 0.0);
  EXPECT_EQ(r.points[0].settlement.expected_profit, r.points[0].settlement.realized_profit);
}

TEST(Sweeps, SettlementColumns) {
  auto c = small_config();
  c.alphas = {0.9};
  c.penetrations = {0.3};
  const auto t = settlement_table(run_grid(c, builtin_fleet()), true);
  EXPECT_EQ(csv_text(CsvTable{t.header, {}}),
            "run_id,alpha,penetration,CR,H,lambda_w,R,R_tilde,deviation_cost,renewable_revenue,curtailed_mwh\n");
  ASSERT_EQ(t.rows.size(), 1u);
}
