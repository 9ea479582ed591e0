#pragma once

#include <vector>

#include "rsloc/common.hpp"
#include "rsloc/geometry.hpp"

namespace rsloc {

struct OfdmConfig {
  double carrier_freq = 3.5e9;  // Hz
  double bandwidth = 1e8;       // Hz
  int subcarrier_count = 100;
  VectorXcd pilots;             // length K, |s_k| > 0

  double subcarrier_spacing() const { return bandwidth / subcarrier_count; }
  double wavelength() const { return constants::speed_of_light / carrier_freq; }
};

struct ObservationSet {
  std::vector<MatrixXcd> per_stripe;  // N matrices, each M x K
  VectorXcd pilots;
};

// ULA response with phase reference at the array centroid:
// element m carries exp(j (2 pi / lambda) d (m - (M-1)/2) sin(aoa)).
VectorXcd array_steering(double aoa, int antenna_count, double spacing,
                         double wavelength);
// d/d(aoa) of the above.
VectorXcd array_steering_deriv(double aoa, int antenna_count, double spacing,
                               double wavelength);

// Frequency-domain steering: entry k is exp(-j 2 pi k df tau).
VectorXcd freq_steering(double tau, int subcarrier_count, double spacing);
// d/d(tau) of the above.
VectorXcd freq_steering_deriv(double tau, int subcarrier_count, double spacing);

// c = (b(tau) .* s) kron a(theta); vec convention is antenna-fastest,
// i.e. c[k*M + m] pairs subcarrier k with antenna m.
VectorXcd spatial_freq_signature(double aoa, double pseudo_delay,
                                 const OfdmConfig& cfg,
                                 const StripePose& stripe);

struct ScenarioConfig;  // harness-level scenario, see scenario.hpp

// Draws Y_n = alpha_n e^{j phi_n} a(theta_n) (b(tau~_n) .* s)^T + W_n for all
// stripes, with W_n = DMC + thermal noise, deterministically from the seed.
ObservationSet synthesize_observations(const ScenarioConfig& scenario,
                                       std::uint64_t seed);

}  // namespace rsloc
