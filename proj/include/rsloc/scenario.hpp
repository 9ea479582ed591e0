#pragma once

#include <vector>

#include "rsloc/dmc.hpp"
#include "rsloc/geometry.hpp"
#include "rsloc/signal.hpp"

namespace rsloc {

// Full experiment description. Defaults reproduce the reference scenario:
// four stripes on the corners of a 10 x 10 m area at 5 m height, boresights
// toward the area center, UE at [7, 3, 1].
struct ScenarioConfig {
  std::vector<StripePose> stripes;
  UeState ue;
  OfdmConfig ofdm;
  double transmit_power = 1e-3;     // W
  double dnr_db = 20.0;             // DMC peak power over noise power, dB
  bool dmc_enabled = true;
  double dmc_decay_distance = 20.0; // m
  double dmc_onset_excess = 1.0;    // m, DMC onset delay past the LoS
  double noise_temperature = 290.0; // K
  bool noiseless = false;           // disables W_n in synthesis (tests only)
  std::uint64_t seed = 1;

  int stripe_count() const { return static_cast<int>(stripes.size()); }
};

ScenarioConfig default_scenario();

// Thermal noise power k_B T0 B.
double noise_power(const ScenarioConfig& scenario);

// Free-space amplitude rho_n = lambda / (4 pi ||p - p_n||).
double path_gain(const ScenarioConfig& scenario, int stripe_index);

// Per-stripe disturbance models (shared alpha_d/beta_d/sigma^2, per-link tau_d).
std::vector<DisturbanceModel> disturbance_models(const ScenarioConfig& scenario);

}  // namespace rsloc
