// gridclear: scenario sweeps, dispatch and settlement from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gridclear/gridclear.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = gridclear::detail::trim(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw gridclear::ConfigError(std::string("bad ") + what + " value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw gridclear::ConfigError(std::string(what) + " list is empty");
  return out;
}

double parse_limit(const std::string& text) {
  if (text == "unlimited") return std::numeric_limits<double>::infinity();
  const auto v = parse_list(text, "line limit");
  if (v.size() != 1) throw gridclear::ConfigError("line limit takes a single value");
  return v.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-based day-ahead market clearing simulator"};
  app.require_subcommand(1);

  gridclear::RunConfig cfg;
  std::string fleet_source = "builtin";
  std::string alpha_text, pen_text, limit_text = "unlimited", profit_mode = "literal";
  int cr = 1;
  bool independent_weather = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--fleet", fleet_source, "fleet CSV path or 'builtin'");
    sub->add_option("--alpha", alpha_text, "risk level(s), comma separated");
    sub->add_option("--penetration", pen_text, "penetration level(s), comma separated");
    sub->add_option("--scenarios", cfg.n_scenarios, "number of scenarios")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--line-limit", limit_text, "uniform line limit in MW or 'unlimited'");
    sub->add_option("--cost-recovery", cr, "cost recovery switch")->check(CLI::IsMember({0, 1}));
    sub->add_option("--horizon", cfg.horizon, "hours")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--buses", cfg.model.n_buses, "number of load buses");
    sub->add_option("--load", cfg.model.total_load, "mean system load, MW");
    sub->add_option("--load-std", cfg.model.load_std_fraction, "load std as a fraction of the mean");
    sub->add_option("--capacity-factor", cfg.model.capacity_factor, "mean renewable capacity factor");
    sub->add_option("--uncertainty-growth", cfg.model.uncertainty_growth, "renewable std growth with capacity");
    sub->add_option("--reserve-cost", cfg.model.reserve_cost, "$/MW of reserve per hour");
    sub->add_option("--ramp-cost", cfg.model.ramp_cost, "$/(MW/h) of ramp per hour");
    sub->add_flag("--independent-weather", independent_weather, "draw renewable output independently per bus");
    sub->add_option("--profit-mode", profit_mode, "literal or recovery-paid")
        ->check(CLI::IsMember({"literal", "recovery-paid"}));
  };

  auto* sweep_alpha = app.add_subcommand("sweep-alpha", "one row per risk level at a fixed penetration");
  auto* sweep_pen = app.add_subcommand("sweep-penetration", "one row per penetration level at a fixed risk level");
  auto* dispatch = app.add_subcommand("dispatch", "committed power and prices per unit and hour");
  auto* settle = app.add_subcommand("settle", "settlement for every (alpha, penetration) pair");
  for (auto* sub : {sweep_alpha, sweep_pen, dispatch, settle}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    cfg.cost_recovery = cr == 1;
    cfg.line_limit = parse_limit(limit_text);
    cfg.model.common_weather = !independent_weather;
    cfg.profit_mode = profit_mode == "literal" ? gridclear::ProfitMode::kLiteral : gridclear::ProfitMode::kRecoveryPaid;
    if (!alpha_text.empty()) cfg.alphas = parse_list(alpha_text, "alpha");
    if (!pen_text.empty()) cfg.penetrations = parse_list(pen_text, "penetration");
    const gridclear::Fleet fleet = gridclear::load_fleet(fleet_source);

    if (sweep_alpha->parsed() && !pen_text.empty()) {
      if (cfg.penetrations.size() != 1) throw gridclear::ConfigError("sweep-alpha takes a single --penetration");
      cfg.alpha_sweep_penetration = cfg.penetrations.front();
    }
    if (sweep_pen->parsed() && !alpha_text.empty()) {
      if (cfg.alphas.size() != 1) throw gridclear::ConfigError("sweep-penetration takes a single --alpha");
      cfg.penetration_sweep_alpha = cfg.alphas.front();
    }
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path out(cfg.out_dir);

    gridclear::SweepResult result;
    if (sweep_alpha->parsed()) {
      result = gridclear::run_alpha_sweep(cfg, fleet);
      gridclear::emit_csv(gridclear::alpha_table(result), (out / "alpha_sweep.csv").string());
    } else if (sweep_pen->parsed()) {
      result = gridclear::run_penetration_sweep(cfg, fleet);
      gridclear::emit_csv(gridclear::penetration_table(result), (out / "penetration_sweep.csv").string());
    } else {
      result = gridclear::run_grid(cfg, fleet);
      if (dispatch->parsed()) {
        gridclear::emit_csv(gridclear::dispatch_table(result, fleet), (out / "dispatch.csv").string());
      }
    }
    gridclear::emit_csv(gridclear::settlement_table(result, cfg.cost_recovery), (out / "settlement.csv").string());

    for (const auto& d : result.diagnostics) std::cerr << "skipped: " << d << '\n';
    for (const auto& p : result.points) {
      for (const auto& v : p.settlement.violations) std::cerr << "run " << p.run_id << ": " << v.message << '\n';
    }
    if (result.points.empty()) {
      std::cerr << "no grid point could be cleared\n";
      return kExitInfeasible;
    }
    return kExitOk;
  } catch (const gridclear::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const gridclear::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gridclear::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gridclear::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitConfig;
  }
}
