#include "rsloc/common.hpp"

#include <cmath>

namespace rsloc {

double wrap_phase(double phi) {
  const double two_pi = 2.0 * constants::pi;
  double w = std::fmod(phi + constants::pi, two_pi);
  if (w < 0.0) w += two_pi;
  return w - constants::pi;
}

namespace {
// splitmix64; used both to mix substream keys and as the PRNG step.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

Rng::Rng(std::uint64_t seed) : state_(seed) {}

Rng Rng::substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = mix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
  s = mix64(s ^ (a + 0xd6e8feb86659fd93ULL));
  s = mix64(s ^ (b + 0xa0761d6478bd642fULL));
  return Rng(s);
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  // 53-bit mantissa in (0, 1]
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * constants::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

cdouble Rng::complex_normal() {
  const double inv_sqrt2 = 0.7071067811865475244;
  double re = normal();
  double im = normal();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

}  // namespace rsloc
