#include "rsloc/scenario.hpp"

#include <cmath>

namespace rsloc {

ScenarioConfig default_scenario() {
  ScenarioConfig sc;
  sc.ofdm.carrier_freq = 3.5e9;
  sc.ofdm.bandwidth = 1e8;
  sc.ofdm.subcarrier_count = 100;
  sc.ofdm.pilots = VectorXcd::Ones(sc.ofdm.subcarrier_count);

  const double lambda = sc.ofdm.wavelength();
  const double half_pi = constants::pi / 2.0;
  // Corners of a 10 x 10 m area at 5 m height, boresights toward the center.
  const Vector3d corners[4] = {{0.0, 0.0, 5.0},
                               {10.0, 0.0, 5.0},
                               {10.0, 10.0, 5.0},
                               {0.0, 10.0, 5.0}};
  const double orientations[4] = {half_pi / 2.0, 3.0 * half_pi / 2.0,
                                  -3.0 * half_pi / 2.0, -half_pi / 2.0};
  for (int n = 0; n < 4; ++n) {
    StripePose stripe;
    stripe.position = corners[n];
    stripe.orientation = orientations[n];
    stripe.antenna_count = 4;
    stripe.element_spacing = lambda / 2.0;
    sc.stripes.push_back(stripe);
  }

  sc.ue.position = Vector3d(7.0, 3.0, 1.0);
  sc.ue.clock_offset = 100.0 / constants::speed_of_light;
  sc.ue.phase_offset = 10.0 * constants::pi / 180.0;

  sc.transmit_power = 1e-3;
  sc.dnr_db = 20.0;
  sc.dmc_enabled = true;
  sc.dmc_decay_distance = 20.0;
  sc.dmc_onset_excess = 1.0;
  sc.noise_temperature = 290.0;
  sc.seed = 1;
  return sc;
}

double noise_power(const ScenarioConfig& scenario) {
  return constants::boltzmann * scenario.noise_temperature *
         scenario.ofdm.bandwidth;
}

double path_gain(const ScenarioConfig& scenario, int stripe_index) {
  const Vector3d r =
      scenario.ue.position -
      scenario.stripes[static_cast<size_t>(stripe_index)].position;
  return scenario.ofdm.wavelength() / (4.0 * constants::pi * r.norm());
}

std::vector<DisturbanceModel> disturbance_models(
    const ScenarioConfig& scenario) {
  const double sigma2 = noise_power(scenario);
  std::vector<DisturbanceModel> models;
  models.reserve(scenario.stripes.size());
  for (int n = 0; n < scenario.stripe_count(); ++n) {
    const StripePose& stripe = scenario.stripes[static_cast<size_t>(n)];
    const LinkGeometry link =
        link_geometry(scenario.ue, stripe, scenario.ofdm.carrier_freq);
    const DmcParams dmc = default_dmc_from_scenario(scenario, link.delay);
    models.push_back(total_covariance(dmc, sigma2, scenario.ofdm.pilots,
                                      stripe.antenna_count));
  }
  return models;
}

}  // namespace rsloc
