#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rsloc/harness.hpp"

using namespace rsloc;

TEST_CASE("average sdnr closed form without dmc") {
  ScenarioConfig sc = default_scenario();
  sc.dmc_enabled = false;
  const double sigma2 = noise_power(sc);
  double sum_rho2 = 0.0;
  for (int n = 0; n < sc.stripe_count(); ++n) {
    const double rho = path_gain(sc, n);
    sum_rho2 += rho * rho;
  }
  const int m_count = sc.stripes[0].antenna_count;
  const double expect_linear =
      sc.transmit_power * m_count * sum_rho2 / (sigma2 * sc.stripe_count());
  CHECK(average_sdnr(sc) ==
        doctest::Approx(10.0 * std::log10(expect_linear)).epsilon(1e-10));
}

TEST_CASE("power calibration hits the requested sdnr exactly") {
  ScenarioConfig sc = default_scenario();
  for (double target : {-5.0, 0.0, 12.0, 25.0}) {
    sc.transmit_power = solve_power_for_sdnr(sc, target);
    CHECK(average_sdnr(sc) == doctest::Approx(target).epsilon(1e-9));
  }
}

TEST_CASE("noise-free monte carlo is error-free") {
  ScenarioConfig sc = default_scenario();
  sc.dmc_enabled = false;
  sc.noiseless = true;
  const MonteCarloResult mc = run_monte_carlo(sc, Mode::Cp, 1);
  CHECK(mc.failures == 0);
  CHECK(mc.rmse_position < 1e-6);
  CHECK(mc.rmse_clock < 1e-14);
  CHECK(mc.trials.size() == 1);
  CHECK_THROWS_AS(run_monte_carlo(sc, Mode::Cp, 0), ConfigError);
}

TEST_CASE("monte carlo is deterministic in the scenario seed") {
  ScenarioConfig sc = default_scenario();
  sc.transmit_power = solve_power_for_sdnr(sc, 25.0);
  const MonteCarloResult a = run_monte_carlo(sc, Mode::Ncp, 3);
  const MonteCarloResult b = run_monte_carlo(sc, Mode::Ncp, 3);
  CHECK(a.rmse_position == b.rmse_position);
  CHECK(a.rmse_clock == b.rmse_clock);
}

TEST_CASE("sweep emits bound curves per requested mode") {
  ScenarioConfig sc = default_scenario();
  SweepSpec spec;
  spec.variable = SweepVariable::SdnrDb;
  spec.values = {0.0, 10.0};
  spec.both_modes = true;
  spec.trials = 0;
  const auto records = run_sweep(spec, sc);
  // 2 points x {peb, ceb} x {cp, ncp}
  CHECK(records.size() == 8);
  int cp_peb = 0;
  for (const CurveRecord& r : records) {
    if (r.series == "peb_cp") {
      ++cp_peb;
      CHECK(r.units == "m");
    }
  }
  CHECK(cp_peb == 2);
  SweepSpec empty = spec;
  empty.values.clear();
  CHECK_THROWS_AS(run_sweep(empty, sc), ConfigError);
}

TEST_CASE("sweep marks failed points and continues") {
  ScenarioConfig sc = default_scenario();
  sc.stripes.resize(1);  // position not identifiable from one stripe
  SweepSpec spec;
  spec.variable = SweepVariable::SdnrDb;
  spec.values = {0.0};
  spec.both_modes = true;
  spec.trials = 0;
  const auto records = run_sweep(spec, sc);
  REQUIRE(records.size() >= 1);
  bool failed = false;
  for (const CurveRecord& r : records) failed = failed || r.series == "failed";
  CHECK(failed);
}

TEST_CASE("csv formatting is ordered and deterministic") {
  std::vector<CurveRecord> records = {
      {2.0, "b", 0.5, "m"},
      {1.0, "b", 1.5, "m"},
      {1.0, "a", -3.25, "ns"},
  };
  const std::string text = format_csv(records);
  CHECK(text ==
        "x,series,value,units\n"
        "1,a,-3.25,ns\n"
        "1,b,1.5,m\n"
        "2,b,0.5,m\n");
  CHECK(format_csv(records) == text);
  CHECK(format_csv({}) == "x,series,value,units\n");
}

TEST_CASE("csv round-trips through an independent parser") {
  std::vector<CurveRecord> records = {
      {1e6, "peb_ncp_m2", 0.54431, "m"},
      {12.0, "rmse_clk_ml_cp", 0.2546, "ns"},
      {0.0, "peb_cp", 0.012532, "m"},
  };
  std::istringstream in(format_csv(records));
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,series,value,units");
  std::vector<CurveRecord> parsed;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    CurveRecord r;
    std::string field;
    std::getline(row, field, ',');
    r.x = std::stod(field);
    std::getline(row, r.series, ',');
    std::getline(row, field, ',');
    r.value = std::stod(field);
    std::getline(row, r.units, ',');
    parsed.push_back(r);
  }
  REQUIRE(parsed.size() == records.size());
  for (const CurveRecord& want : records) {
    bool found = false;
    for (const CurveRecord& got : parsed) {
      found = found || (got.series == want.series && got.x == want.x &&
                        got.value == want.value && got.units == want.units);
    }
    CHECK(found);
  }
}

TEST_CASE("csv emission surfaces io failures with context") {
  CHECK_THROWS_AS(emit_csv({}, "/nonexistent-dir/out.csv"), IoError);
  const char* path = "test_emit.csv";
  emit_csv({{1.0, "s", 2.0, "m"}}, path);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == "x,series,value,units\n1,s,2,m\n");
  std::remove(path);
}

TEST_CASE("bandwidth sweep holds the configured sdnr fixed") {
  ScenarioConfig sc = default_scenario();
  SweepSpec spec;
  spec.variable = SweepVariable::Bandwidth;
  spec.values = {5e7, 2e8};
  spec.both_modes = false;
  spec.mode = Mode::Cp;
  spec.fixed_sdnr_db = 12.0;
  const auto records = run_sweep(spec, sc);
  CHECK(records.size() == 4);
  // spot-check the re-calibration directly
  sc.ofdm.bandwidth = 2e8;
  sc.transmit_power = solve_power_for_sdnr(sc, 12.0);
  CHECK(average_sdnr(sc) == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("coherent position bound is flat in bandwidth") {
  ScenarioConfig sc = default_scenario();
  const auto records = fig2_curves(sc);
  // 13 bandwidths x 4 array sizes x 2 sync models
  CHECK(records.size() == 104);
  // the non-coherent bound falls steeply with bandwidth
  double first = 0.0, last = 0.0;
  for (const CurveRecord& r : records) {
    if (r.series != "peb_ncp_m2") continue;
    if (r.x == 1e6) first = r.value;
    if (r.x == 1e9) last = r.value;
  }
  CHECK(first > 5.0 * last);

  // with white disturbance the coherent bound is essentially constant; with
  // the colored disturbance enabled a narrow resonance appears where the
  // aliased pseudo-delay crosses the disturbance delay support, so the
  // strict flatness check lives in the acceptance suite alongside the other
  // reference-figure regressions
  sc.dmc_enabled = false;
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i <= 12; ++i) {
    sc.ofdm.bandwidth = std::pow(10.0, 6.0 + 0.25 * i);
    sc.transmit_power = solve_power_for_sdnr(sc, 12.0);
    const double peb = evaluate_bounds(sc, SyncModel::Coherent).peb;
    lo = std::min(lo, peb);
    hi = std::max(hi, peb);
  }
  CHECK(hi / lo < 1.2);
}

TEST_CASE("config parsing: defaults, overrides and rejection") {
  SUBCASE("empty text reproduces the default scenario") {
    const ScenarioConfig sc = parse_config("");
    const ScenarioConfig def = default_scenario();
    CHECK(sc.stripe_count() == def.stripe_count());
    CHECK((sc.ue.position - def.ue.position).norm() == 0.0);
    CHECK(sc.ofdm.carrier_freq == def.ofdm.carrier_freq);
    CHECK(sc.transmit_power == def.transmit_power);
    CHECK(sc.seed == def.seed);
  }
  SUBCASE("sections override scenario fields") {
    const ScenarioConfig sc = parse_config(
        "[scenario]\n"
        "seed = 9\n"
        "transmit_power = 2e-3\n"
        "[ue]\n"
        "position = 1 2 1.5\n"
        "clock_offset = 1e-7\n"
        "[ofdm]\n"
        "bandwidth = 5e7\n"
        "subcarriers = 64\n"
        "[stripes]\n"
        "stripe = 0 0 3 0.5\n"
        "stripe = 4 0 3 -0.5\n"
        "stripe = 2 4 3 1.0\n"
        "antennas = 6\n");
    CHECK(sc.seed == 9);
    CHECK(sc.transmit_power == 2e-3);
    CHECK(sc.ue.position.x() == 1.0);
    CHECK(sc.ue.clock_offset == 1e-7);
    CHECK(sc.ofdm.subcarrier_count == 64);
    CHECK(sc.ofdm.pilots.size() == 64);
    REQUIRE(sc.stripe_count() == 3);
    CHECK(sc.stripes[2].orientation == doctest::Approx(1.0));
    CHECK(sc.stripes[0].antenna_count == 6);
    CHECK(sc.stripes[0].element_spacing ==
          doctest::Approx(sc.ofdm.wavelength() / 2.0));
  }
  SUBCASE("comments and blank lines are ignored") {
    const ScenarioConfig sc = parse_config(
        "# leading comment\n\n[scenario]\nseed = 4 ; trailing\n");
    CHECK(sc.seed == 4);
  }
  SUBCASE("unknown keys are rejected with a line number") {
    try {
      parse_config("[scenario]\nbogus = 1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config("[scenario]\nseed = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[ue]\nposition = 1 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("no equals sign here\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[ofdm]\nsubcarriers = 0\n"), ConfigError);
  }
  SUBCASE("missing files surface as io errors") {
    CHECK_THROWS_AS(load_config("/no/such/config.ini"), IoError);
  }
}
