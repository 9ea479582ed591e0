#pragma once

#include <optional>
#include <vector>

#include "rsloc/scenario.hpp"

namespace rsloc {

enum class Mode { Cp, Ncp };

struct WhitenedData {
  std::vector<MatrixXcd> per_stripe;  // Y'_n = Y_n L^{-T}, each M x K
};

WhitenedData whiten(const ObservationSet& obs,
                    const std::vector<DisturbanceModel>& models);

// Closed-form real amplitude for a fixed carrier phase:
// alpha = Re{(e^{j phase} sig)^H data} / ||sig||^2.
double amplitude_hat(double phase, const VectorXcd& signature,
                     const VectorXcd& data);

struct PhaseEstimate {
  double value = 0.0;           // principal value in [-pi/2, pi/2)
  bool ambiguous_mod_pi = true; // the estimate is only defined modulo pi
};

// Precomputes the per-trial quantities needed by the compressed ML costs.
class EstimationContext {
 public:
  EstimationContext(const ScenarioConfig& scenario, WhitenedData data,
                    const std::vector<DisturbanceModel>& models);

  // Coherent compressed cost L(p2d, dtau); exploits the common phase offset.
  double cost_cp(const Vector2d& p2d, double dtau) const;
  // Non-coherent cost: sum of per-stripe orthogonal-projector residuals.
  double cost_ncp(const Vector2d& p2d, double dtau) const;
  // Closed-form phase offset at a candidate point (modulo pi).
  PhaseEstimate phase_offset(const Vector2d& p2d, double dtau) const;
  // Per-stripe amplitude estimates at a candidate point (CP model).
  VectorXd amplitudes(const Vector2d& p2d, double dtau, double phase) const;
  // |gamma_n| for the unstructured-gain (NCP) model.
  VectorXd gain_magnitudes(const Vector2d& p2d, double dtau) const;

  const ScenarioConfig& scenario() const { return *scenario_; }

 private:
  struct StripeTerms {
    cdouble corr;      // z = c'^H y'
    double sig_norm2;  // ||c'||^2
    double delay;      // tau_n at the candidate position
  };
  StripeTerms terms(int n, const Vector2d& p2d, double dtau) const;

  const ScenarioConfig* scenario_;
  WhitenedData data_;
  const std::vector<DisturbanceModel>* models_;
  std::vector<double> data_norm2_;  // ||y'_n||^2
};

// Free-function forms of the two costs.
double ml_cost_cp(const Vector2d& p2d, double dtau, const WhitenedData& data,
                  const ScenarioConfig& scenario,
                  const std::vector<DisturbanceModel>& models);
double ml_cost_ncp(const Vector2d& p2d, double dtau, const WhitenedData& data,
                   const ScenarioConfig& scenario,
                   const std::vector<DisturbanceModel>& models);

struct IlsResult {
  Vector2d position_2d = Vector2d::Zero();
  double clock_offset = 0.0;
  VectorXd pseudo_delays;  // per-link coarse estimates, s
  bool converged = false;
  int iterations = 0;
};

// Coarse pseudo-delays via an N_F-point IFFT energy peak per stripe, then
// Gauss-Newton multilateration for (p2d, dtau) with the UE height known.
IlsResult ils_initializer(const ObservationSet& obs,
                          const ScenarioConfig& scenario, int nfft = 4096);

// Multilateration core operating on given pseudo-delays (used directly by
// tests with exact inputs).
IlsResult ils_solve(const VectorXd& pseudo_delays,
                    const ScenarioConfig& scenario);

struct EstimationResult {
  Vector2d position_2d = Vector2d::Zero();
  double clock_offset = 0.0;
  std::optional<PhaseEstimate> phase_offset;  // CP mode only
  VectorXd gains;                             // alpha_n (CP) or |gamma_n| (NCP)
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  bool init_failed = false;
};

// Nelder-Mead refinement of one cost from a given start point.
EstimationResult refine(const EstimationContext& ctx, Mode mode,
                        const Vector2d& init_p2d, double init_dtau);

// Full pipeline: ILS -> NCP refinement -> (CP local grid + refinement).
struct PipelineResult {
  IlsResult ils;
  EstimationResult ncp;
  std::optional<EstimationResult> cp;
};
PipelineResult estimate(const ObservationSet& obs,
                        const ScenarioConfig& scenario,
                        const std::vector<DisturbanceModel>& models, Mode mode);

}  // namespace rsloc
