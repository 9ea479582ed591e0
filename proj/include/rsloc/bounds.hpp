#pragma once

#include "rsloc/scenario.hpp"

namespace rsloc {

// Coherent: one clock + one phase offset shared by all stripes (N_c = 2).
// NonCoherent: one clock offset + a separate phase per stripe (N_c = N+1).
enum class SyncModel { Coherent, NonCoherent };

inline int sync_param_count(SyncModel sync, int n_stripes) {
  return sync == SyncModel::Coherent ? 2 : n_stripes + 1;
}

struct ChannelFim {
  Matrix4d matrix = Matrix4d::Zero();  // over [theta, tau~, phi, alpha]
};

struct BoundsResult {
  MatrixXd fim;              // (N + N_c + 2) square
  Matrix3d efim = Matrix3d::Zero();
  double peb = 0.0;          // m
  double ceb = 0.0;          // s
};

// Closed-form 4x4 channel-parameter FIM for one link; the theta row/column
// decouples because the array phase reference sits at the centroid.
ChannelFim channel_fim(const LinkGeometry& link, double amplitude,
                       const DisturbanceModel& model, const OfdmConfig& cfg,
                       const StripePose& stripe);

// Jacobian T_n from channel parameters [theta, tau~, phi, alpha] to the
// position-domain vector [p2d, sync params, amplitudes].
MatrixXd jacobian(const UeState& ue, const StripePose& stripe, SyncModel sync,
                  int stripe_index, int n_stripes, double wavelength);

// Accumulated position-domain FIM (sum of T_n J_n T_n^T); no EFIM reduction.
BoundsResult position_fim(const ScenarioConfig& scenario, SyncModel sync);

// Schur-complement EFIM over [p2d, dtau] and the PEB/CEB values.
BoundsResult efim_and_bounds(const MatrixXd& fim, int sync_params);

// position_fim followed by efim_and_bounds.
BoundsResult evaluate_bounds(const ScenarioConfig& scenario, SyncModel sync);

}  // namespace rsloc
