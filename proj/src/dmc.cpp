#include "rsloc/dmc.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rsloc/scenario.hpp"

namespace rsloc {

VectorXcd dmc_psd_samples(const DmcParams& params, int subcarrier_count) {
  VectorXcd kappa(subcarrier_count);
  for (int k = 0; k < subcarrier_count; ++k) {
    const double fk = static_cast<double>(k) / subcarrier_count;
    const cdouble denom(params.coherence_bandwidth_norm,
                        2.0 * constants::pi * fk);
    kappa(k) = params.peak_power / denom *
               std::polar(1.0, -2.0 * constants::pi * fk *
                                   params.onset_time_norm);
  }
  return kappa;
}

MatrixXcd freq_covariance(const DmcParams& params, int subcarrier_count) {
  const VectorXcd kappa = dmc_psd_samples(params, subcarrier_count);
  MatrixXcd rf(subcarrier_count, subcarrier_count);
  for (int i = 0; i < subcarrier_count; ++i) {
    for (int j = 0; j < subcarrier_count; ++j) {
      rf(i, j) = i >= j ? kappa(i - j) : std::conj(kappa(j - i));
    }
  }
  return rf;
}

DisturbanceModel::DisturbanceModel(MatrixXcd g, double noise_power,
                                   int antenna_count)
    : g_(std::move(g)), noise_power_(noise_power),
      antenna_count_(antenna_count) {
  Eigen::LLT<MatrixXcd> llt(g_);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("total_covariance: factor not positive definite");
  }
  chol_lower_ = llt.matrixL();
}

MatrixXcd DisturbanceModel::covariance() const {
  const int k_count = subcarrier_count();
  const int mk = k_count * antenna_count_;
  MatrixXcd r = MatrixXcd::Zero(mk, mk);
  for (int i = 0; i < k_count; ++i) {
    for (int j = 0; j < k_count; ++j) {
      for (int m = 0; m < antenna_count_; ++m) {
        r(i * antenna_count_ + m, j * antenna_count_ + m) = g_(i, j);
      }
    }
  }
  return r;
}

MatrixXcd DisturbanceModel::whitener() const {
  const int k_count = subcarrier_count();
  const int mk = k_count * antenna_count_;
  const MatrixXcd linv = chol_lower_.triangularView<Eigen::Lower>().solve(
      MatrixXcd::Identity(k_count, k_count));
  MatrixXcd w = MatrixXcd::Zero(mk, mk);
  for (int i = 0; i < k_count; ++i) {
    for (int j = 0; j < k_count; ++j) {
      for (int m = 0; m < antenna_count_; ++m) {
        w(i * antenna_count_ + m, j * antenna_count_ + m) = linv(i, j);
      }
    }
  }
  return w;
}

MatrixXcd DisturbanceModel::whiten_matrix(const MatrixXcd& y) const {
  // vec(Y L^{-T}) = (L^{-1} kron I_M) vec(Y), antenna-fastest convention
  return chol_lower_.triangularView<Eigen::Lower>()
      .solve(y.transpose())
      .transpose();
}

VectorXcd DisturbanceModel::whiten_freq(const VectorXcd& v) const {
  return chol_lower_.triangularView<Eigen::Lower>().solve(v);
}

cdouble DisturbanceModel::quad_form(const VectorXcd& u,
                                    const VectorXcd& v) const {
  return whiten_freq(u).dot(whiten_freq(v));
}

double DisturbanceModel::quad_form(const VectorXcd& u) const {
  return whiten_freq(u).squaredNorm();
}

DisturbanceModel total_covariance(const DmcParams& params, double noise_power,
                                  const VectorXcd& pilots, int antenna_count) {
  if (noise_power <= 0.0) {
    throw NumericalError("total_covariance: noise power must be positive");
  }
  const int k_count = static_cast<int>(pilots.size());
  MatrixXcd g = freq_covariance(params, k_count)
                    .cwiseProduct(pilots * pilots.adjoint());
  g += noise_power * MatrixXcd::Identity(k_count, k_count);
  return DisturbanceModel(std::move(g), noise_power, antenna_count);
}

DmcParams default_dmc_from_scenario(const ScenarioConfig& scenario,
                                    double los_delay) {
  const double c = constants::speed_of_light;
  const double b = scenario.ofdm.bandwidth;
  DmcParams params;
  const double sigma2 = noise_power(scenario);
  params.peak_power =
      scenario.dmc_enabled ? sigma2 * std::pow(10.0, scenario.dnr_db / 10.0)
                           : 0.0;
  params.coherence_bandwidth_norm = 1.0 / ((scenario.dmc_decay_distance / c) * b);
  params.onset_time_norm = (b / scenario.ofdm.subcarrier_count) *
                           (los_delay + scenario.dmc_onset_excess / c);
  return params;
}

MatrixXcd draw_dmc(const DmcParams& params, int subcarrier_count,
                   int antenna_count, Rng& rng) {
  if (params.peak_power <= 0.0) {
    return MatrixXcd::Zero(antenna_count, subcarrier_count);
  }
  // R_f alone can be numerically singular; draw through its eigen square root
  // with negative eigenvalues clamped.
  const MatrixXcd rf = freq_covariance(params, subcarrier_count);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rf);
  if (es.info() != Eigen::Success) {
    throw NumericalError("draw_dmc: eigendecomposition failed");
  }
  VectorXd scale = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  MatrixXcd factor = es.eigenvectors() * scale.asDiagonal();

  MatrixXcd w(antenna_count, subcarrier_count);
  for (int m = 0; m < antenna_count; ++m) {
    VectorXcd u(subcarrier_count);
    for (int k = 0; k < subcarrier_count; ++k) u(k) = rng.complex_normal();
    w.row(m) = (factor * u).transpose();
  }
  return w;
}

}  // namespace rsloc
