#include "rsloc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rsloc {

double average_sdnr(const ScenarioConfig& scenario) {
  const std::vector<DisturbanceModel> models = disturbance_models(scenario);
  const int n_count = scenario.stripe_count();
  const int k_count = scenario.ofdm.subcarrier_count;
  double acc = 0.0;
  for (int n = 0; n < n_count; ++n) {
    const StripePose& stripe = scenario.stripes[static_cast<size_t>(n)];
    const LinkGeometry link =
        link_geometry(scenario.ue, stripe, scenario.ofdm.carrier_freq);
    const VectorXcd bs =
        freq_steering(link.pseudo_delay, k_count,
                      scenario.ofdm.subcarrier_spacing())
            .cwiseProduct(scenario.ofdm.pilots);
    // c^H R^{-1} c = M * (b.*s)^H G^{-1} (b.*s)
    const double rho = path_gain(scenario, n);
    acc += rho * rho * stripe.antenna_count *
           models[static_cast<size_t>(n)].quad_form(bs);
  }
  const double linear = scenario.transmit_power * acc / (n_count * k_count);
  return 10.0 * std::log10(linear);
}

double solve_power_for_sdnr(const ScenarioConfig& scenario, double target_db) {
  // SDNR is linear in P, so one evaluation calibrates it exactly
  const double current_db = average_sdnr(scenario);
  return scenario.transmit_power *
         std::pow(10.0, (target_db - current_db) / 10.0);
}

namespace {

double rmse(const std::vector<double>& sq, size_t count) {
  if (count == 0) return 0.0;
  double acc = 0.0;
  for (double v : sq) acc += v;
  return std::sqrt(acc / static_cast<double>(count));
}

}  // namespace

MonteCarloResult run_monte_carlo(const ScenarioConfig& scenario, Mode mode,
                                 int trials) {
  if (trials < 1) throw ConfigError("run_monte_carlo: trials must be >= 1");
  const std::vector<DisturbanceModel> models = disturbance_models(scenario);
  const Vector2d true_p = scenario.ue.position.head<2>();
  const double true_dt = scenario.ue.clock_offset;

  MonteCarloResult out;
  std::vector<double> sq_pos, sq_clk, sq_pos_ok, sq_clk_ok;
  std::vector<double> sq_pos_ils, sq_clk_ils, sq_pos_ncp, sq_clk_ncp;
  for (int trial = 0; trial < trials; ++trial) {
    const ObservationSet obs = synthesize_observations(
        scenario, scenario.seed + static_cast<std::uint64_t>(trial));
    const PipelineResult res = estimate(obs, scenario, models, mode);

    TrialRecord rec;
    rec.trial = trial;
    rec.ils_pos_err = (res.ils.position_2d - true_p).norm();
    rec.ils_clock_err = std::abs(res.ils.clock_offset - true_dt);
    rec.ncp_pos_err = (res.ncp.position_2d - true_p).norm();
    rec.ncp_clock_err = std::abs(res.ncp.clock_offset - true_dt);
    rec.init_failed = res.ncp.init_failed;
    if (res.cp) {
      rec.cp_pos_err = (res.cp->position_2d - true_p).norm();
      rec.cp_clock_err = std::abs(res.cp->clock_offset - true_dt);
    }
    out.trials.push_back(rec);

    const double pe = mode == Mode::Cp ? rec.cp_pos_err : rec.ncp_pos_err;
    const double ce = mode == Mode::Cp ? rec.cp_clock_err : rec.ncp_clock_err;
    sq_pos.push_back(pe * pe);
    sq_clk.push_back(ce * ce);
    if (!rec.init_failed) {
      sq_pos_ok.push_back(pe * pe);
      sq_clk_ok.push_back(ce * ce);
    } else {
      ++out.failures;
    }
    sq_pos_ils.push_back(rec.ils_pos_err * rec.ils_pos_err);
    sq_clk_ils.push_back(rec.ils_clock_err * rec.ils_clock_err);
    sq_pos_ncp.push_back(rec.ncp_pos_err * rec.ncp_pos_err);
    sq_clk_ncp.push_back(rec.ncp_clock_err * rec.ncp_clock_err);
  }
  out.rmse_position = rmse(sq_pos, sq_pos.size());
  out.rmse_clock = rmse(sq_clk, sq_clk.size());
  out.rmse_position_ok = rmse(sq_pos_ok, sq_pos_ok.size());
  out.rmse_clock_ok = rmse(sq_clk_ok, sq_clk_ok.size());
  out.rmse_position_ils = rmse(sq_pos_ils, sq_pos_ils.size());
  out.rmse_clock_ils = rmse(sq_clk_ils, sq_clk_ils.size());
  out.rmse_position_ncp = rmse(sq_pos_ncp, sq_pos_ncp.size());
  out.rmse_clock_ncp = rmse(sq_clk_ncp, sq_clk_ncp.size());
  return out;
}

namespace {

void append_bounds(std::vector<CurveRecord>& records, double x,
                   const ScenarioConfig& sc, bool cp, bool ncp,
                   const std::string& suffix = "") {
  if (cp) {
    const BoundsResult b = evaluate_bounds(sc, SyncModel::Coherent);
    records.push_back({x, "peb_cp" + suffix, b.peb, "m"});
    records.push_back({x, "ceb_cp" + suffix, b.ceb * 1e9, "ns"});
  }
  if (ncp) {
    const BoundsResult b = evaluate_bounds(sc, SyncModel::NonCoherent);
    records.push_back({x, "peb_ncp" + suffix, b.peb, "m"});
    records.push_back({x, "ceb_ncp" + suffix, b.ceb * 1e9, "ns"});
  }
}

}  // namespace

std::vector<CurveRecord> run_sweep(const SweepSpec& spec,
                                   const ScenarioConfig& scenario) {
  if (spec.values.empty()) throw ConfigError("run_sweep: no sweep values");
  std::vector<CurveRecord> records;
  const bool cp = spec.both_modes || spec.mode == Mode::Cp;
  const bool ncp = spec.both_modes || spec.mode == Mode::Ncp;

  for (double x : spec.values) {
    ScenarioConfig sc = scenario;
    switch (spec.variable) {
      case SweepVariable::SdnrDb:
        sc.transmit_power = solve_power_for_sdnr(sc, x);
        break;
      case SweepVariable::Bandwidth:
        sc.ofdm.bandwidth = x;
        sc.transmit_power = solve_power_for_sdnr(sc, spec.fixed_sdnr_db);
        break;
      case SweepVariable::Antennas: {
        for (StripePose& s : sc.stripes) {
          s.antenna_count = static_cast<int>(x);
        }
        sc.transmit_power = solve_power_for_sdnr(sc, spec.fixed_sdnr_db);
        break;
      }
    }
    try {
      append_bounds(records, x, sc, cp, ncp);
      if (spec.trials > 0) {
        if (cp) {
          const MonteCarloResult mc = run_monte_carlo(sc, Mode::Cp, spec.trials);
          records.push_back({x, "rmse_pos_ml_cp", mc.rmse_position, "m"});
          records.push_back({x, "rmse_clk_ml_cp", mc.rmse_clock * 1e9, "ns"});
          records.push_back({x, "rmse_pos_ml_ncp", mc.rmse_position_ncp, "m"});
          records.push_back(
              {x, "rmse_clk_ml_ncp", mc.rmse_clock_ncp * 1e9, "ns"});
          records.push_back({x, "rmse_pos_ils", mc.rmse_position_ils, "m"});
          records.push_back(
              {x, "rmse_clk_ils", mc.rmse_clock_ils * 1e9, "ns"});
        } else if (ncp) {
          const MonteCarloResult mc =
              run_monte_carlo(sc, Mode::Ncp, spec.trials);
          records.push_back({x, "rmse_pos_ml_ncp", mc.rmse_position, "m"});
          records.push_back(
              {x, "rmse_clk_ml_ncp", mc.rmse_clock * 1e9, "ns"});
          records.push_back({x, "rmse_pos_ils", mc.rmse_position_ils, "m"});
          records.push_back(
              {x, "rmse_clk_ils", mc.rmse_clock_ils * 1e9, "ns"});
        }
      }
    } catch (const NumericalError&) {
      records.push_back({x, "failed", 1.0, "flag"});
    }
  }
  return records;
}

std::string format_csv(const std::vector<CurveRecord>& records) {
  std::vector<CurveRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CurveRecord& a, const CurveRecord& b) {
                     if (a.series != b.series) return a.series < b.series;
                     return a.x < b.x;
                   });
  std::string out = "x,series,value,units\n";
  char buf[128];
  for (const CurveRecord& r : sorted) {
    std::snprintf(buf, sizeof(buf), "%.12g,%s,%.12g,%s\n", r.x,
                  r.series.c_str(), r.value, r.units.c_str());
    out += buf;
  }
  return out;
}

void emit_csv(const std::vector<CurveRecord>& records,
              const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("emit_csv: cannot open " + path);
  f << format_csv(records);
  if (!f) throw IoError("emit_csv: write failed for " + path);
}

std::vector<CurveRecord> fig2_curves(const ScenarioConfig& base) {
  // PEB vs bandwidth at fixed SDNR (12 dB), for several array sizes
  std::vector<CurveRecord> records;
  std::vector<double> bandwidths;
  for (int i = 0; i <= 12; ++i) {
    bandwidths.push_back(std::pow(10.0, 6.0 + 0.25 * i));
  }
  for (int m : {2, 4, 6, 8}) {
    ScenarioConfig sc = base;
    for (StripePose& s : sc.stripes) s.antenna_count = m;
    for (double b : bandwidths) {
      sc.ofdm.bandwidth = b;
      sc.transmit_power = solve_power_for_sdnr(sc, 12.0);
      const std::string suffix = "_m" + std::to_string(m);
      const BoundsResult cp = evaluate_bounds(sc, SyncModel::Coherent);
      const BoundsResult ncp = evaluate_bounds(sc, SyncModel::NonCoherent);
      records.push_back({b, "peb_cp" + suffix, cp.peb, "m"});
      records.push_back({b, "peb_ncp" + suffix, ncp.peb, "m"});
    }
  }
  return records;
}

namespace {

std::vector<CurveRecord> sdnr_figure(const ScenarioConfig& base, int trials) {
  SweepSpec spec;
  spec.variable = SweepVariable::SdnrDb;
  spec.values = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
  spec.both_modes = true;
  spec.trials = trials;
  return run_sweep(spec, base);
}

}  // namespace

std::vector<CurveRecord> fig3_curves(const ScenarioConfig& base, int trials) {
  std::vector<CurveRecord> all = sdnr_figure(base, trials);
  std::vector<CurveRecord> records;
  for (const CurveRecord& r : all) {
    if (r.units == "m" || r.series == "failed") records.push_back(r);
  }
  return records;
}

std::vector<CurveRecord> fig4_curves(const ScenarioConfig& base, int trials) {
  std::vector<CurveRecord> all = sdnr_figure(base, trials);
  std::vector<CurveRecord> records;
  for (const CurveRecord& r : all) {
    if (r.units == "ns" || r.series == "failed") records.push_back(r);
  }
  return records;
}

}  // namespace rsloc
