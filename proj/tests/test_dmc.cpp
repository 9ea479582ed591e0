#include <doctest.h>

#include <cmath>

#include "rsloc/scenario.hpp"

using namespace rsloc;

namespace {
constexpr double kPi = constants::pi;

DmcParams sample_params() {
  DmcParams p;
  p.peak_power = 1.0;
  p.coherence_bandwidth_norm = 0.05;
  p.onset_time_norm = 0.1;
  return p;
}
}  // namespace

TEST_CASE("psd samples match the scalar formula") {
  const DmcParams p = sample_params();
  const int k_count = 8;
  const VectorXcd kappa = dmc_psd_samples(p, k_count);
  REQUIRE(kappa.size() == k_count);
  for (int k = 0; k < k_count; ++k) {
    const double fk = static_cast<double>(k) / k_count;
    const cdouble expect = p.peak_power /
                           cdouble(p.coherence_bandwidth_norm, 2.0 * kPi * fk) *
                           std::exp(cdouble(0.0, -2.0 * kPi * fk *
                                                     p.onset_time_norm));
    CHECK(std::abs(kappa(k) - expect) < 1e-15);
  }
  CHECK(kappa(0).real() ==
        doctest::Approx(p.peak_power / p.coherence_bandwidth_norm));
  CHECK(kappa(0).imag() == doctest::Approx(0.0));

  DmcParams off = p;
  off.peak_power = 0.0;
  CHECK(dmc_psd_samples(off, k_count).norm() == 0.0);
}

TEST_CASE("frequency covariance is the Toeplitz fill of the psd samples") {
  const DmcParams p = sample_params();
  const int k_count = 4;
  const VectorXcd kappa = dmc_psd_samples(p, k_count);
  const MatrixXcd rf = freq_covariance(p, k_count);
  REQUIRE(rf.rows() == k_count);
  for (int i = 0; i < k_count; ++i) {
    for (int j = 0; j < k_count; ++j) {
      const cdouble expect = i >= j ? kappa(i - j) : std::conj(kappa(j - i));
      CHECK(std::abs(rf(i, j) - expect) < 1e-15);
    }
  }
  CHECK((rf - rf.adjoint()).norm() == 0.0);
  for (int i = 0; i < k_count; ++i) {
    CHECK(std::abs(rf(i, i) - kappa(0)) < 1e-15);
  }
  DmcParams off = p;
  off.peak_power = 0.0;
  CHECK(freq_covariance(off, k_count).norm() == 0.0);
}

TEST_CASE("total covariance with the dmc disabled is white") {
  DmcParams off;
  off.peak_power = 0.0;
  off.coherence_bandwidth_norm = 1.0;
  const double sigma2 = 0.3;
  const VectorXcd pilots = VectorXcd::Ones(4);
  const DisturbanceModel model = total_covariance(off, sigma2, pilots, 2);
  CHECK((model.covariance() - sigma2 * MatrixXcd::Identity(8, 8)).norm() <
        1e-14);
  CHECK((model.whitener() -
         (1.0 / std::sqrt(sigma2)) * MatrixXcd::Identity(8, 8))
            .norm() < 1e-12);
}

TEST_CASE("total covariance structure and whitening correctness") {
  const DmcParams p = sample_params();
  const double sigma2 = 0.5;
  const int k_count = 4, m_count = 2;
  VectorXcd pilots(k_count);
  pilots << cdouble(1, 0), cdouble(0, 1), cdouble(-1, 0), cdouble(0.5, 0.5);
  const DisturbanceModel model =
      total_covariance(p, sigma2, pilots, m_count);
  const MatrixXcd r = model.covariance();

  // Hermitian, eigenvalues no smaller than the noise floor
  CHECK((r - r.adjoint()).norm() < 1e-14);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(r);
  CHECK(es.eigenvalues().minCoeff() >= sigma2 * (1.0 - 1e-12));

  // Kronecker structure: one antenna's slice across subcarriers equals the
  // frequency factor
  const MatrixXcd rf = freq_covariance(p, k_count);
  for (int i = 0; i < k_count; ++i) {
    for (int j = 0; j < k_count; ++j) {
      cdouble expect = rf(i, j) * pilots(i) * std::conj(pilots(j));
      if (i == j) expect += sigma2;
      CHECK(std::abs(r(i * m_count, j * m_count) - expect) < 1e-13);
      CHECK(std::abs(r(i * m_count + 1, j * m_count)) <
            (i == j ? 1e-13 : 1e-13));
    }
  }

  // F R F^H = I
  const MatrixXcd f = model.whitener();
  const MatrixXcd eye = f * r * f.adjoint();
  CHECK((eye - MatrixXcd::Identity(eye.rows(), eye.cols())).norm() /
            std::sqrt(static_cast<double>(eye.rows())) <
        1e-8);
}

TEST_CASE("matrix whitening agrees with the stacked whitener") {
  const DmcParams p = sample_params();
  const int k_count = 4, m_count = 3;
  const VectorXcd pilots = VectorXcd::Ones(k_count);
  const DisturbanceModel model = total_covariance(p, 0.25, pilots, m_count);

  Rng rng(3);
  MatrixXcd y(m_count, k_count);
  for (int m = 0; m < m_count; ++m) {
    for (int k = 0; k < k_count; ++k) y(m, k) = rng.complex_normal();
  }
  const MatrixXcd yw = model.whiten_matrix(y);

  // antenna-fastest vectorization
  VectorXcd v(m_count * k_count);
  for (int k = 0; k < k_count; ++k) {
    for (int m = 0; m < m_count; ++m) v(k * m_count + m) = y(m, k);
  }
  const VectorXcd vw = model.whitener() * v;
  for (int k = 0; k < k_count; ++k) {
    for (int m = 0; m < m_count; ++m) {
      CHECK(std::abs(yw(m, k) - vw(k * m_count + m)) < 1e-12);
    }
  }
  // quadratic forms match the explicit inverse
  const MatrixXcd ginv = model.freq_factor().inverse();
  VectorXcd u1(k_count), u2(k_count);
  for (int k = 0; k < k_count; ++k) {
    u1(k) = rng.complex_normal();
    u2(k) = rng.complex_normal();
  }
  const cdouble direct = (u1.adjoint() * ginv * u2)(0);
  CHECK(std::abs(model.quad_form(u1, u2) - direct) < 1e-12);
  CHECK(model.quad_form(u1) ==
        doctest::Approx((u1.adjoint() * ginv * u1)(0).real()).epsilon(1e-10));
}

TEST_CASE("invalid noise power is rejected") {
  const DmcParams p = sample_params();
  CHECK_THROWS_AS(total_covariance(p, 0.0, VectorXcd::Ones(4), 2),
                  NumericalError);
  CHECK_THROWS_AS(total_covariance(p, -1.0, VectorXcd::Ones(4), 2),
                  NumericalError);
}

TEST_CASE("scenario defaults feed the dmc parameters") {
  ScenarioConfig sc = default_scenario();
  const double sigma2 = noise_power(sc);
  const double tau = 5.0 / constants::speed_of_light;
  const DmcParams p = default_dmc_from_scenario(sc, tau);
  CHECK(p.peak_power == doctest::Approx(100.0 * sigma2).scale(0.0).epsilon(1e-9));
  CHECK(p.coherence_bandwidth_norm ==
        doctest::Approx(constants::speed_of_light / (20.0 * 1e8)));
  CHECK(p.onset_time_norm ==
        doctest::Approx(1e6 * (5.0 + 1.0) / constants::speed_of_light).scale(0.0).epsilon(1e-9));
  sc.dmc_enabled = false;
  CHECK(default_dmc_from_scenario(sc, tau).peak_power == 0.0);
}

TEST_CASE("dmc draws are deterministic and vanish when disabled") {
  const DmcParams p = sample_params();
  Rng a = Rng::substream(1, 0, 0);
  Rng b = Rng::substream(1, 0, 0);
  const MatrixXcd w1 = draw_dmc(p, 6, 2, a);
  const MatrixXcd w2 = draw_dmc(p, 6, 2, b);
  CHECK((w1 - w2).norm() == 0.0);

  DmcParams off = p;
  off.peak_power = 0.0;
  Rng c(9);
  CHECK(draw_dmc(off, 6, 2, c).norm() == 0.0);
}
