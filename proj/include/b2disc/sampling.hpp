#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "b2disc/geometry.hpp"

namespace b2disc {

inline constexpr double kTau = 6.28318530717958647692528676656;

// Portable uniform in [0,1): fixed bit recipe so that seeded runs reproduce
// byte-identically across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Area-uniform point of the annulus r in [r_lo, r_hi), full circle.
inline complexd sample_annulus(std::mt19937_64& rng, double r_lo, double r_hi) {
  const double u = uniform01(rng);
  const double r = std::sqrt(r_lo * r_lo + u * (r_hi * r_hi - r_lo * r_lo));
  const double th = kTau * uniform01(rng);
  return complexd(r * std::cos(th), r * std::sin(th));
}

// Area-uniform point of the disc of radius R.
inline complexd sample_disc(std::mt19937_64& rng, double R = 1.0) {
  return sample_annulus(rng, 0.0, R);
}

}  // namespace b2disc
