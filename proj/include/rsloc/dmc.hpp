#pragma once

#include "rsloc/common.hpp"

namespace rsloc {

struct ScenarioConfig;

// Dense multipath parameters, normalized per the exponential-decay PSD model.
struct DmcParams {
  double peak_power = 0.0;              // alpha_d
  double coherence_bandwidth_norm = 1.0;  // beta_d
  double onset_time_norm = 0.0;         // tau_d
};

// kappa[k] = alpha_d / (beta_d + j 2 pi f_k) * exp(-j 2 pi f_k tau_d),
// sampled at normalized frequencies f_k = k/K.
VectorXcd dmc_psd_samples(const DmcParams& params, int subcarrier_count);

// Hermitian Toeplitz frequency covariance R_f built from kappa.
MatrixXcd freq_covariance(const DmcParams& params, int subcarrier_count);

// Total disturbance covariance R = (R_f .* s s^H) kron I_M + sigma^2 I.
// R factors as G kron I_M with G = R_f .* s s^H + sigma^2 I_K, so only the
// K x K factor and its Cholesky are stored; the full MK x MK matrices are
// materialized on demand for diagnostics/tests.
class DisturbanceModel {
 public:
  DisturbanceModel(MatrixXcd g, double noise_power, int antenna_count);

  const MatrixXcd& freq_factor() const { return g_; }
  double noise_power() const { return noise_power_; }
  int antenna_count() const { return antenna_count_; }
  int subcarrier_count() const { return static_cast<int>(g_.rows()); }

  // Full covariance R = G kron I_M.
  MatrixXcd covariance() const;
  // A whitening factor F with F R F^H = I, here L^{-1} kron I_M from G = L L^H.
  MatrixXcd whitener() const;

  // Whitened observation matrix: Y' = Y L^{-T}, such that
  // vec(Y') = (L^{-1} kron I_M) vec(Y).
  MatrixXcd whiten_matrix(const MatrixXcd& y) const;
  // L^{-1} v for a frequency-domain K-vector (e.g. b .* s).
  VectorXcd whiten_freq(const VectorXcd& v) const;

  // Quadratic forms u^H G^{-1} v.
  cdouble quad_form(const VectorXcd& u, const VectorXcd& v) const;
  double quad_form(const VectorXcd& u) const;

 private:
  MatrixXcd g_;
  MatrixXcd chol_lower_;
  double noise_power_;
  int antenna_count_;
};

// Assembles the disturbance model; throws NumericalError if the factor is not
// positive definite.
DisturbanceModel total_covariance(const DmcParams& params, double noise_power,
                                  const VectorXcd& pilots, int antenna_count);

// Scenario defaults: beta_d = 1/(T_d B) with T_d = decay_distance/c,
// tau_d = (B/K)(tau_n + onset_excess/c), alpha_d = sigma^2 10^(DNR/10).
DmcParams default_dmc_from_scenario(const ScenarioConfig& scenario,
                                    double los_delay);

// One DMC realization for an M-antenna stripe: rows are i.i.d. CN(0, R_f)
// K-vectors (pilot weighting is applied by the synthesizer).
MatrixXcd draw_dmc(const DmcParams& params, int subcarrier_count,
                   int antenna_count, Rng& rng);

}  // namespace rsloc
