#include "rsloc/signal.hpp"

#include <cmath>

#include "rsloc/scenario.hpp"

namespace rsloc {

VectorXcd array_steering(double aoa, int antenna_count, double spacing,
                         double wavelength) {
  VectorXcd a(antenna_count);
  const double k = 2.0 * constants::pi / wavelength;
  const double center = (antenna_count - 1) / 2.0;
  const double s = std::sin(aoa);
  for (int m = 0; m < antenna_count; ++m) {
    a(m) = std::polar(1.0, k * spacing * (m - center) * s);
  }
  return a;
}

VectorXcd array_steering_deriv(double aoa, int antenna_count, double spacing,
                               double wavelength) {
  VectorXcd da = array_steering(aoa, antenna_count, spacing, wavelength);
  const double k = 2.0 * constants::pi / wavelength;
  const double center = (antenna_count - 1) / 2.0;
  const double c = std::cos(aoa);
  for (int m = 0; m < antenna_count; ++m) {
    da(m) *= cdouble(0.0, k * spacing * (m - center) * c);
  }
  return da;
}

VectorXcd freq_steering(double tau, int subcarrier_count, double spacing) {
  VectorXcd b(subcarrier_count);
  for (int k = 0; k < subcarrier_count; ++k) {
    b(k) = std::polar(1.0, -2.0 * constants::pi * k * spacing * tau);
  }
  return b;
}

VectorXcd freq_steering_deriv(double tau, int subcarrier_count,
                              double spacing) {
  VectorXcd db = freq_steering(tau, subcarrier_count, spacing);
  for (int k = 0; k < subcarrier_count; ++k) {
    db(k) *= cdouble(0.0, -2.0 * constants::pi * k * spacing);
  }
  return db;
}

VectorXcd spatial_freq_signature(double aoa, double pseudo_delay,
                                 const OfdmConfig& cfg,
                                 const StripePose& stripe) {
  const int m_count = stripe.antenna_count;
  const int k_count = cfg.subcarrier_count;
  const VectorXcd a =
      array_steering(aoa, m_count, stripe.element_spacing, cfg.wavelength());
  const VectorXcd bs = freq_steering(pseudo_delay, k_count,
                                     cfg.subcarrier_spacing())
                           .cwiseProduct(cfg.pilots);
  VectorXcd c(m_count * k_count);
  for (int k = 0; k < k_count; ++k) {
    c.segment(k * m_count, m_count) = bs(k) * a;
  }
  return c;
}

ObservationSet synthesize_observations(const ScenarioConfig& scenario,
                                       std::uint64_t seed) {
  const OfdmConfig& ofdm = scenario.ofdm;
  const int k_count = ofdm.subcarrier_count;
  const double sigma2 = noise_power(scenario);
  const double sigma = std::sqrt(sigma2);

  ObservationSet out;
  out.pilots = ofdm.pilots;
  out.per_stripe.reserve(scenario.stripes.size());

  for (int n = 0; n < scenario.stripe_count(); ++n) {
    const StripePose& stripe = scenario.stripes[static_cast<size_t>(n)];
    const int m_count = stripe.antenna_count;
    const LinkGeometry link =
        link_geometry(scenario.ue, stripe, ofdm.carrier_freq);
    const double alpha =
        std::sqrt(scenario.transmit_power) * path_gain(scenario, n);

    const VectorXcd a = array_steering(link.aoa, m_count,
                                       stripe.element_spacing,
                                       ofdm.wavelength());
    const VectorXcd bs =
        freq_steering(link.pseudo_delay, k_count, ofdm.subcarrier_spacing())
            .cwiseProduct(ofdm.pilots);

    MatrixXcd y = std::polar(alpha, link.carrier_phase) * a * bs.transpose();

    if (!scenario.noiseless) {
      Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(n), 0);
      if (scenario.dmc_enabled) {
        const DmcParams dmc = default_dmc_from_scenario(scenario, link.delay);
        MatrixXcd w = draw_dmc(dmc, k_count, m_count, rng);
        // column k of the DMC term is weighted by pilot s_k
        for (int k = 0; k < k_count; ++k) w.col(k) *= ofdm.pilots(k);
        y += w;
      }
      for (int k = 0; k < k_count; ++k) {
        for (int m = 0; m < m_count; ++m) {
          y(m, k) += sigma * rng.complex_normal();
        }
      }
    }
    out.per_stripe.push_back(std::move(y));
  }
  return out;
}

}  // namespace rsloc
