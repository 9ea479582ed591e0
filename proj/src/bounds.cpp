#include "rsloc/bounds.hpp"

#include <cmath>

#include <Eigen/LU>

namespace rsloc {

ChannelFim channel_fim(const LinkGeometry& link, double amplitude,
                       const DisturbanceModel& model, const OfdmConfig& cfg,
                       const StripePose& stripe) {
  const int m_count = stripe.antenna_count;
  const double lambda = cfg.wavelength();
  const double df = cfg.subcarrier_spacing();
  const int k_count = cfg.subcarrier_count;

  const VectorXcd da = array_steering_deriv(link.aoa, m_count,
                                            stripe.element_spacing, lambda);
  const VectorXcd bs =
      freq_steering(link.pseudo_delay, k_count, df).cwiseProduct(cfg.pilots);
  const VectorXcd dbs = freq_steering_deriv(link.pseudo_delay, k_count, df)
                            .cwiseProduct(cfg.pilots);

  // Kronecker reduction: (u2 kron u1)^H (G kron I)^{-1} (v2 kron v1)
  //   = (u2^H G^{-1} v2)(u1^H v1)
  const double q_bb = model.quad_form(bs);
  const double q_dd = model.quad_form(dbs);
  const cdouble q_db = model.quad_form(dbs, bs);
  const double da_norm2 = da.squaredNorm();
  const double a2 = amplitude * amplitude;

  ChannelFim out;
  Matrix4d& j = out.matrix;
  // order: [theta, tau~, phi, alpha]; theta decouples with the centroid
  // reference (a^H da is imaginary and sums to zero)
  j(0, 0) = 2.0 * a2 * q_bb * da_norm2;
  j(1, 1) = 2.0 * a2 * q_dd * m_count;
  j(1, 2) = j(2, 1) = 2.0 * std::real(cdouble(0.0, 1.0) * a2 * q_db) * m_count;
  j(1, 3) = j(3, 1) = 2.0 * std::real(amplitude * q_db) * m_count;
  j(2, 2) = 2.0 * a2 * q_bb * m_count;
  j(3, 3) = 2.0 * q_bb * m_count;
  return out;
}

MatrixXd jacobian(const UeState& ue, const StripePose& stripe, SyncModel sync,
                  int stripe_index, int n_stripes, double wavelength) {
  const int n_sync = sync_param_count(sync, n_stripes);
  const int dim = n_stripes + n_sync + 2;
  MatrixXd t = MatrixXd::Zero(dim, 4);

  const Vector3d r3 = ue.position - stripe.position;
  const Vector2d r2 = r3.head<2>();
  const double range = r3.norm();
  if (range <= 0.0) {
    throw std::domain_error("jacobian: UE colocated with stripe");
  }
  const double c = constants::speed_of_light;

  // AoA block: zero in the horizontally-colocated boresight case
  const double h2 = r2.squaredNorm();
  if (h2 > 0.0) {
    t(0, 0) = r2.y() / h2;
    t(1, 0) = -r2.x() / h2;
  }
  // delay and carrier-phase blocks
  t.block<2, 1>(0, 1) = r2 / (c * range);
  t.block<2, 1>(0, 2) = -2.0 * constants::pi * r2 / (wavelength * range);

  // clock offset row
  t(2, 1) = 1.0;
  // phase offset row(s)
  if (sync == SyncModel::Coherent) {
    t(3, 2) = 1.0;
  } else {
    t(3 + stripe_index, 2) = 1.0;
  }
  // amplitude selection
  t(2 + n_sync + stripe_index, 3) = 1.0;
  return t;
}

BoundsResult position_fim(const ScenarioConfig& scenario, SyncModel sync) {
  const int n_count = scenario.stripe_count();
  const int n_sync = sync_param_count(sync, n_count);
  const int dim = n_count + n_sync + 2;
  const std::vector<DisturbanceModel> models = disturbance_models(scenario);

  BoundsResult out;
  out.fim = MatrixXd::Zero(dim, dim);
  for (int n = 0; n < n_count; ++n) {
    const StripePose& stripe = scenario.stripes[static_cast<size_t>(n)];
    const LinkGeometry link =
        link_geometry(scenario.ue, stripe, scenario.ofdm.carrier_freq);
    const double alpha =
        std::sqrt(scenario.transmit_power) * path_gain(scenario, n);
    const ChannelFim jch = channel_fim(link, alpha,
                                       models[static_cast<size_t>(n)],
                                       scenario.ofdm, stripe);
    const MatrixXd t = jacobian(scenario.ue, stripe, sync, n, n_count,
                                scenario.ofdm.wavelength());
    out.fim += t * jch.matrix * t.transpose();
  }
  return out;
}

BoundsResult efim_and_bounds(const MatrixXd& fim, int sync_params) {
  (void)sync_params;  // the marginalized block is everything past [p2d, dtau]
  BoundsResult out;
  out.fim = fim;
  const int dim = static_cast<int>(fim.rows());

  // The parameters mix units (meters, seconds, radians, raw amplitudes), so
  // the raw FIM spans many decades; symmetric Jacobi scaling keeps the Schur
  // complement and the inversions well conditioned.
  VectorXd d(dim);
  for (int i = 0; i < dim; ++i) {
    if (!(fim(i, i) > 0.0)) {
      throw NumericalError("efim_and_bounds: singular nuisance block");
    }
    d(i) = 1.0 / std::sqrt(fim(i, i));
  }
  const MatrixXd fs = d.asDiagonal() * fim * d.asDiagonal();

  const MatrixXd jww = fs.topLeftCorner(3, 3);
  const MatrixXd jwu = fs.topRightCorner(3, dim - 3);
  const MatrixXd juu = fs.bottomRightCorner(dim - 3, dim - 3);
  Eigen::FullPivLU<MatrixXd> lu(juu);
  if (!lu.isInvertible()) {
    throw NumericalError("efim_and_bounds: singular nuisance block");
  }
  const MatrixXd efim_scaled = jww - jwu * lu.solve(jwu.transpose());
  const Eigen::Vector3d dw = d.head<3>();
  out.efim = dw.cwiseInverse().asDiagonal() * efim_scaled *
             dw.cwiseInverse().asDiagonal();

  Eigen::FullPivLU<MatrixXd> lue(efim_scaled);
  if (!lue.isInvertible()) {
    throw NumericalError("efim_and_bounds: singular equivalent FIM");
  }
  const Matrix3d inv =
      dw.asDiagonal() * lue.inverse() * dw.asDiagonal();  // = efim^{-1}
  out.peb = std::sqrt(inv(0, 0) + inv(1, 1));
  out.ceb = std::sqrt(inv(2, 2));
  return out;
}

BoundsResult evaluate_bounds(const ScenarioConfig& scenario, SyncModel sync) {
  BoundsResult fim = position_fim(scenario, sync);
  return efim_and_bounds(fim.fim, sync_param_count(sync,
                                                   scenario.stripe_count()));
}

}  // namespace rsloc
