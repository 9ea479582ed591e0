#pragma once

#include "rsloc/common.hpp"

namespace rsloc {

// One uniform linear array receiver with known pose.
struct StripePose {
  Vector3d position = Vector3d::Zero();  // m
  double orientation = 0.0;              // rad, ccw rotation about z from x-axis
  int antenna_count = 4;
  double element_spacing = 0.0;          // m
};

struct UeState {
  Vector3d position = Vector3d::Zero();  // m
  double clock_offset = 0.0;             // s
  double phase_offset = 0.0;             // rad, in [-pi, pi)
};

// Per-link channel parameters derived from the geometry.
struct LinkGeometry {
  double delay = 0.0;          // tau, s
  double pseudo_delay = 0.0;   // tau + clock offset, s
  double aoa = 0.0;            // rad, azimuth in the stripe's local frame
  double carrier_phase = 0.0;  // rad, -2*pi*fc*tau + phase offset, wrapped
  Vector3d local_position = Vector3d::Zero();
};

// Standard rotation about the z-axis.
Matrix3d rotation_matrix(double beta);

// Delay, pseudo-delay, AoA and carrier phase for one UE-stripe link.
// Throws std::domain_error when the UE coincides with the stripe position.
LinkGeometry link_geometry(const UeState& ue, const StripePose& stripe,
                           double carrier_freq);

}  // namespace rsloc
