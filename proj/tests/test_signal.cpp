#include <doctest.h>

#include <cmath>

#include "rsloc/scenario.hpp"

using namespace rsloc;

namespace {
constexpr double kPi = constants::pi;
}  // namespace

TEST_CASE("array steering basics") {
  const VectorXcd single = array_steering(0.3, 1, 0.05, 0.1);
  REQUIRE(single.size() == 1);
  CHECK(std::abs(single(0) - cdouble(1.0, 0.0)) < 1e-15);

  const VectorXcd a = array_steering(0.4, 5, 0.042, 0.084);
  for (int m = 0; m < a.size(); ++m) {
    CHECK(std::abs(a(m)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // centroid phase reference: the phases sum to zero
  cdouble prod = 1.0;
  for (int m = 0; m < a.size(); ++m) prod *= a(m);
  CHECK(std::abs(prod - cdouble(1.0, 0.0)) < 1e-12);
  // broadside: all entries equal one
  const VectorXcd broad = array_steering(0.0, 4, 0.042, 0.084);
  CHECK((broad - VectorXcd::Ones(4)).norm() < 1e-15);
}

TEST_CASE("array steering derivative matches finite differences") {
  const double h = 1e-6;
  const double aoa = 0.53;
  const VectorXcd d = array_steering_deriv(aoa, 6, 0.04, 0.09);
  const VectorXcd fd = (array_steering(aoa + h, 6, 0.04, 0.09) -
                        array_steering(aoa - h, 6, 0.04, 0.09)) /
                       (2.0 * h);
  CHECK((d - fd).norm() / fd.norm() < 1e-8);
}

TEST_CASE("frequency steering basics and derivative") {
  const double df = 1e6;
  const double tau = 3.3e-7;
  const VectorXcd b = freq_steering(tau, 8, df);
  CHECK(std::abs(b(0) - cdouble(1.0, 0.0)) < 1e-15);
  for (int k = 0; k < 8; ++k) {
    CHECK(std::abs(b(k)) == doctest::Approx(1.0).epsilon(1e-12));
    const cdouble expect = std::polar(1.0, -2.0 * kPi * k * df * tau);
    CHECK(std::abs(b(k) - expect) < 1e-12);
  }
  const double h = 1e-12;
  const VectorXcd d = freq_steering_deriv(tau, 8, df);
  const VectorXcd fd =
      (freq_steering(tau + h, 8, df) - freq_steering(tau - h, 8, df)) /
      (2.0 * h);
  CHECK((d - fd).norm() / fd.norm() < 1e-6);
}

TEST_CASE("spatial-frequency signature uses the antenna-fastest layout") {
  OfdmConfig cfg;
  cfg.carrier_freq = 3.5e9;
  cfg.bandwidth = 4e6;
  cfg.subcarrier_count = 4;
  cfg.pilots = VectorXcd::Ones(4);
  cfg.pilots(2) = cdouble(0.0, 2.0);
  StripePose stripe;
  stripe.antenna_count = 3;
  stripe.element_spacing = cfg.wavelength() / 2.0;

  const double aoa = 0.2, tau = 1.1e-7;
  const VectorXcd c = spatial_freq_signature(aoa, tau, cfg, stripe);
  REQUIRE(c.size() == 12);
  const VectorXcd a =
      array_steering(aoa, 3, stripe.element_spacing, cfg.wavelength());
  const VectorXcd bs =
      freq_steering(tau, 4, cfg.subcarrier_spacing()).cwiseProduct(cfg.pilots);
  for (int k = 0; k < 4; ++k) {
    for (int m = 0; m < 3; ++m) {
      CHECK(std::abs(c(k * 3 + m) - bs(k) * a(m)) < 1e-12);
    }
  }
}

TEST_CASE("synthesis is deterministic in the seed") {
  const ScenarioConfig sc = default_scenario();
  const ObservationSet x = synthesize_observations(sc, 11);
  const ObservationSet y = synthesize_observations(sc, 11);
  REQUIRE(x.per_stripe.size() == y.per_stripe.size());
  for (size_t n = 0; n < x.per_stripe.size(); ++n) {
    CHECK((x.per_stripe[n] - y.per_stripe[n]).norm() == 0.0);
  }
  const ObservationSet z = synthesize_observations(sc, 12);
  bool differs = false;
  for (size_t n = 0; n < x.per_stripe.size(); ++n) {
    differs = differs || (x.per_stripe[n] - z.per_stripe[n]).norm() > 0.0;
  }
  CHECK(differs);
}

TEST_CASE("noiseless synthesis reproduces the rank-one mean exactly") {
  ScenarioConfig sc = default_scenario();
  sc.noiseless = true;
  const ObservationSet obs = synthesize_observations(sc, 5);
  REQUIRE(obs.per_stripe.size() == 4);

  for (int n = 0; n < 4; ++n) {
    const StripePose& stripe = sc.stripes[static_cast<size_t>(n)];
    const LinkGeometry link =
        link_geometry(sc.ue, stripe, sc.ofdm.carrier_freq);
    const double alpha = std::sqrt(sc.transmit_power) * path_gain(sc, n);
    const VectorXcd a =
        array_steering(link.aoa, stripe.antenna_count, stripe.element_spacing,
                       sc.ofdm.wavelength());
    const VectorXcd bs = freq_steering(link.pseudo_delay,
                                       sc.ofdm.subcarrier_count,
                                       sc.ofdm.subcarrier_spacing())
                             .cwiseProduct(sc.ofdm.pilots);
    const MatrixXcd mean =
        std::polar(alpha, link.carrier_phase) * a * bs.transpose();
    CHECK((obs.per_stripe[static_cast<size_t>(n)] - mean).norm() /
              mean.norm() <
          1e-12);
  }
}

TEST_CASE("disturbance power tracks the configured temperature") {
  ScenarioConfig sc = default_scenario();
  sc.dmc_enabled = false;
  const double sigma2 = noise_power(sc);
  // empirical variance over one large draw
  const ObservationSet obs = synthesize_observations(sc, 3);
  ScenarioConfig clean = sc;
  clean.noiseless = true;
  const ObservationSet mean = synthesize_observations(clean, 3);
  double acc = 0.0;
  int count = 0;
  for (size_t n = 0; n < obs.per_stripe.size(); ++n) {
    acc += (obs.per_stripe[n] - mean.per_stripe[n]).squaredNorm();
    count += static_cast<int>(obs.per_stripe[n].size());
  }
  CHECK(acc / count == doctest::Approx(sigma2).epsilon(0.05));
}
