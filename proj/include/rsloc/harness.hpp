#pragma once

#include <string>
#include <vector>

#include "rsloc/bounds.hpp"
#include "rsloc/estimators.hpp"

namespace rsloc {

// Average received signal-to-(DMC+noise) ratio over the network, in dB:
// (P/(N K)) sum_n rho_n^2 c_n^H R_n^{-1} c_n with c_n at the true link
// parameters.
double average_sdnr(const ScenarioConfig& scenario);

// Transmit power that calibrates average_sdnr to the target (linear in P).
double solve_power_for_sdnr(const ScenarioConfig& scenario, double target_db);

struct TrialRecord {
  int trial = 0;
  double ils_pos_err = 0.0;
  double ils_clock_err = 0.0;
  double ncp_pos_err = 0.0;
  double ncp_clock_err = 0.0;
  double cp_pos_err = 0.0;    // populated in CP mode
  double cp_clock_err = 0.0;
  bool init_failed = false;
};

struct MonteCarloResult {
  double rmse_position = 0.0;        // requested mode, all trials
  double rmse_clock = 0.0;
  double rmse_position_ok = 0.0;     // excluding failed initializations
  double rmse_clock_ok = 0.0;
  double rmse_position_ils = 0.0;
  double rmse_clock_ils = 0.0;
  double rmse_position_ncp = 0.0;    // NCP stage (always run)
  double rmse_clock_ncp = 0.0;
  int failures = 0;
  std::vector<TrialRecord> trials;
};

MonteCarloResult run_monte_carlo(const ScenarioConfig& scenario, Mode mode,
                                 int trials);

enum class SweepVariable { SdnrDb, Bandwidth, Antennas };

struct SweepSpec {
  SweepVariable variable = SweepVariable::SdnrDb;
  std::vector<double> values;
  Mode mode = Mode::Cp;
  bool both_modes = true;
  int trials = 0;              // 0 = bounds only
  double fixed_sdnr_db = 12.0; // held for bandwidth/antenna sweeps
};

struct CurveRecord {
  double x = 0.0;
  std::string series;
  double value = 0.0;
  std::string units;
};

std::vector<CurveRecord> run_sweep(const SweepSpec& spec,
                                   const ScenarioConfig& scenario);

// Header `x,series,value,units`, rows ordered by (series, x), deterministic
// formatting.
void emit_csv(const std::vector<CurveRecord>& records, const std::string& path);
std::string format_csv(const std::vector<CurveRecord>& records);

// Canned reproductions of the three reference figures.
std::vector<CurveRecord> fig2_curves(const ScenarioConfig& base);
std::vector<CurveRecord> fig3_curves(const ScenarioConfig& base, int trials);
std::vector<CurveRecord> fig4_curves(const ScenarioConfig& base, int trials);

// INI-style config ingestion; an empty file yields default_scenario().
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text);

}  // namespace rsloc
