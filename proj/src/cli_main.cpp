#include <cmath>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "rsloc/harness.hpp"

namespace {

using namespace rsloc;

ScenarioConfig make_scenario(const std::string& config_path,
                             std::int64_t seed) {
  ScenarioConfig sc =
      config_path.empty() ? default_scenario() : load_config(config_path);
  if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
  return sc;
}

void write_or_print(const std::vector<CurveRecord>& records,
                    const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(format_csv(records).c_str(), stdout);
  } else {
    emit_csv(records, out_path);
  }
}

Mode parse_mode(const std::string& mode) {
  if (mode == "cp") return Mode::Cp;
  if (mode == "ncp") return Mode::Ncp;
  throw ConfigError("unknown mode: " + mode);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radio-stripe uplink positioning: simulation, ML estimation "
               "and error bounds"};
  app.require_subcommand(1);
  app.fallthrough();  // allow global options after the subcommand

  std::string config_path;
  std::int64_t seed = -1;
  std::string mode = "both";
  std::string out_path;
  int trials = 200;
  app.add_option("--config", config_path, "Scenario config file (INI-style)");
  app.add_option("--seed", seed, "Override the scenario RNG seed");
  app.add_option("--mode", mode, "cp|ncp|both");
  app.add_option("--out", out_path, "Output CSV path (default: stdout)");
  app.add_option("--trials", trials, "Monte-Carlo trials");

  double sdnr_db = std::nan("");
  auto* cmd_bounds =
      app.add_subcommand("bounds", "PEB/CEB for one scenario");
  cmd_bounds->add_option("--sdnr", sdnr_db,
                         "Calibrate transmit power to this average SDNR (dB)");
  auto* cmd_sim = app.add_subcommand("simulate", "One Monte-Carlo run");
  cmd_sim->add_option("--sdnr", sdnr_db,
                      "Calibrate transmit power to this average SDNR (dB)");

  std::string sweep_var = "sdnr_db";
  std::vector<double> sweep_values;
  double fixed_sdnr = 12.0;
  auto* cmd_sweep = app.add_subcommand("sweep", "Parameter sweep to CSV");
  cmd_sweep->add_option("--variable", sweep_var, "sdnr_db|bandwidth|antennas");
  cmd_sweep->add_option("--values", sweep_values, "Sweep values")->required();
  cmd_sweep->add_option("--fixed-sdnr", fixed_sdnr,
                        "SDNR (dB) held for bandwidth/antenna sweeps");

  auto* cmd_fig2 = app.add_subcommand("fig2", "PEB vs bandwidth curves");
  auto* cmd_fig3 = app.add_subcommand("fig3", "Position bounds/RMSE vs SDNR");
  auto* cmd_fig4 = app.add_subcommand("fig4", "Clock bounds/RMSE vs SDNR");

  // figs default to bound curves only unless trials are requested explicitly
  int fig_trials = 0;
  cmd_fig3->add_option("--trials", fig_trials, "Add RMSE curves (0 = bounds only)");
  cmd_fig4->add_option("--trials", fig_trials, "Add RMSE curves (0 = bounds only)");

  CLI11_PARSE(app, argc, argv);

  try {
    ScenarioConfig sc = make_scenario(config_path, seed);

    if (cmd_bounds->parsed()) {
      if (!std::isnan(sdnr_db)) sc.transmit_power = solve_power_for_sdnr(sc, sdnr_db);
      std::vector<CurveRecord> records;
      const double x = average_sdnr(sc);
      const bool cp = mode != "ncp";
      const bool ncp = mode != "cp";
      if (cp) {
        const BoundsResult b = evaluate_bounds(sc, SyncModel::Coherent);
        records.push_back({x, "peb_cp", b.peb, "m"});
        records.push_back({x, "ceb_cp", b.ceb * 1e9, "ns"});
        std::printf("cp:  peb = %.6g m, ceb = %.6g ns\n", b.peb, b.ceb * 1e9);
      }
      if (ncp) {
        const BoundsResult b = evaluate_bounds(sc, SyncModel::NonCoherent);
        records.push_back({x, "peb_ncp", b.peb, "m"});
        records.push_back({x, "ceb_ncp", b.ceb * 1e9, "ns"});
        std::printf("ncp: peb = %.6g m, ceb = %.6g ns\n", b.peb, b.ceb * 1e9);
      }
      std::printf("average sdnr = %.4f dB\n", x);
      if (!out_path.empty()) emit_csv(records, out_path);
    } else if (cmd_sim->parsed()) {
      if (!std::isnan(sdnr_db)) sc.transmit_power = solve_power_for_sdnr(sc, sdnr_db);
      const Mode m = mode == "both" ? Mode::Cp : parse_mode(mode);
      const MonteCarloResult mc = run_monte_carlo(sc, m, trials);
      std::printf("trials = %zu, failures = %d\n", mc.trials.size(),
                  mc.failures);
      std::printf("rmse position = %.6g m (excl. failures %.6g)\n",
                  mc.rmse_position, mc.rmse_position_ok);
      std::printf("rmse clock    = %.6g ns (excl. failures %.6g)\n",
                  mc.rmse_clock * 1e9, mc.rmse_clock_ok * 1e9);
      std::printf("rmse ils      = %.6g m / %.6g ns\n", mc.rmse_position_ils,
                  mc.rmse_clock_ils * 1e9);
      if (!out_path.empty()) {
        std::vector<CurveRecord> records;
        const double x = average_sdnr(sc);
        records.push_back({x, "rmse_position", mc.rmse_position, "m"});
        records.push_back({x, "rmse_clock", mc.rmse_clock * 1e9, "ns"});
        records.push_back({x, "rmse_position_ils", mc.rmse_position_ils, "m"});
        records.push_back({x, "rmse_clock_ils", mc.rmse_clock_ils * 1e9, "ns"});
        records.push_back(
            {x, "failures", static_cast<double>(mc.failures), "count"});
        emit_csv(records, out_path);
      }
    } else if (cmd_sweep->parsed()) {
      SweepSpec spec;
      if (sweep_var == "sdnr_db") {
        spec.variable = SweepVariable::SdnrDb;
      } else if (sweep_var == "bandwidth") {
        spec.variable = SweepVariable::Bandwidth;
      } else if (sweep_var == "antennas") {
        spec.variable = SweepVariable::Antennas;
      } else {
        throw ConfigError("unknown sweep variable: " + sweep_var);
      }
      spec.values = sweep_values;
      spec.both_modes = mode == "both";
      if (!spec.both_modes) spec.mode = parse_mode(mode);
      spec.trials = app.count("--trials") ? trials : 0;
      spec.fixed_sdnr_db = fixed_sdnr;
      write_or_print(run_sweep(spec, sc), out_path);
    } else if (cmd_fig2->parsed()) {
      write_or_print(fig2_curves(sc), out_path);
    } else if (cmd_fig3->parsed()) {
      write_or_print(fig3_curves(sc, fig_trials), out_path);
    } else if (cmd_fig4->parsed()) {
      write_or_print(fig4_curves(sc, fig_trials), out_path);
    }
  } catch (const rsloc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const rsloc::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const rsloc::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
