#include "rsloc/geometry.hpp"

#include <cmath>

namespace rsloc {

Matrix3d rotation_matrix(double beta) {
  Matrix3d m;
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  m << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  return m;
}

LinkGeometry link_geometry(const UeState& ue, const StripePose& stripe,
                           double carrier_freq) {
  const Vector3d r = ue.position - stripe.position;
  const double range = r.norm();
  if (range <= 0.0) {
    throw std::domain_error("link_geometry: UE colocated with stripe");
  }
  LinkGeometry out;
  out.delay = range / constants::speed_of_light;
  out.pseudo_delay = out.delay + ue.clock_offset;
  // AoA in the stripe's local frame: rotate into it, then measure from the
  // array boresight (local +y) toward local +x.
  out.local_position = rotation_matrix(stripe.orientation).transpose() * r;
  const double lx = out.local_position.x();
  const double ly = out.local_position.y();
  if (lx == 0.0 && ly == 0.0) {
    throw std::domain_error("link_geometry: UE on the stripe's vertical axis");
  }
  out.aoa = constants::pi / 2.0 - std::atan2(ly, lx);
  out.carrier_phase = wrap_phase(
      -2.0 * constants::pi * carrier_freq * out.delay + ue.phase_offset);
  return out;
}

}  // namespace rsloc
