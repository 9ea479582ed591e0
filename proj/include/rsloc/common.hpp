#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rsloc {

using cdouble = std::complex<double>;
using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace constants {
inline constexpr double speed_of_light = 299792458.0;       // m/s
inline constexpr double boltzmann = 1.380649e-23;           // J/K
inline constexpr double pi = 3.141592653589793238462643383279502884;
}  // namespace constants

// Error categories mapped to CLI exit codes (config=1, numerical=2, io=3).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wrap an angle to [-pi, pi).
double wrap_phase(double phi);

// Deterministic random stream. std::normal_distribution is implementation
// defined, so gaussians are produced with an explicit Box-Muller transform to
// keep outputs reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  // Independent substream derived from (seed, a, b), e.g. (seed, stripe, trial).
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  double uniform();             // (0, 1]
  double normal();              // N(0, 1)
  cdouble complex_normal();     // CN(0, 1)

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t next_u64();
};

}  // namespace rsloc
