// Test-side oracles: independent brute-force and closed-form routes used to
// fix expected values. These deliberately avoid the library's quadrature
// engines and series fast paths.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using complexd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

// closed-form average of (1-r^2)^a over a box of normalized arc length h
inline double radial_box_average(double a, double h) {
  const double u = 1.0 - (1.0 - h) * (1.0 - h);
  if (a <= -1.0) return std::numeric_limits<double>::infinity();
  return std::pow(u, a) / (a + 1.0);
}

// closed-form B2 product of (1-|z|^2)^alpha: independent of the box
inline double radial_b2_product(double alpha) {
  if (std::abs(alpha) >= 1.0) return std::numeric_limits<double>::infinity();
  return 1.0 / ((1.0 + alpha) * (1.0 - alpha));
}

inline bool radial_in_b2(double alpha) { return std::abs(alpha) < 1.0; }
inline bool point_in_b2(double s) { return std::abs(s) < 2.0; }

// closed-form bisection for gamma over the radial family: e^{f/t} with
// f = alpha log(1-|z|^2) is a radial power of exponent alpha/t
inline double gamma_radial(double alpha) { return std::abs(alpha); }
// ... and over the point family |xi-z|^s: threshold 2 in the exponent
inline double gamma_point(double s) { return std::abs(s) / 2.0; }

// plain tensor quadrature of a weight over a box (uniform in u = r^2 and in
// angle); deliberately naive
inline double brute_box_average(const std::function<double(complexd)>& w, double center,
                                double h, int nr, int nt) {
  const double r2lo = (1.0 - h) * (1.0 - h);
  double tot = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double u = r2lo + (i + 0.5) / nr * (1.0 - r2lo);
    const double r = std::sqrt(u);
    for (int b = 0; b < nt; ++b) {
      const double th = center + ((b + 0.5) / nt - 0.5) * h * 2.0 * kPi;
      tot += w(complexd(r * std::cos(th), r * std::sin(th)));
    }
  }
  return tot / (static_cast<double>(nr) * nt);
}

// direct series evaluation: sum a_k z^{n_k} term by term through the stable
// magnitude/angle split (no shared code with the library path)
inline complexd brute_lacunary_eval(const std::vector<complexd>& a,
                                    const std::vector<std::int64_t>& n, complexd z,
                                    bool derivative) {
  complexd acc(0.0, 0.0);
  const double az = std::abs(z);
  if (az == 0.0) {
    if (derivative) {
      for (size_t k = 0; k < n.size(); ++k) {
        if (n[k] == 1) acc += a[k];
      }
      return acc;
    }
    return acc;
  }
  const double lr = std::log(az);
  const double th = std::atan2(z.imag(), z.real());
  for (size_t k = 0; k < a.size(); ++k) {
    const double nk = static_cast<double>(n[k]);
    if (derivative) {
      const double mag = nk * std::exp((nk - 1.0) * lr);
      acc += a[k] * mag * complexd(std::cos((nk - 1.0) * th), std::sin((nk - 1.0) * th));
    } else {
      const double mag = std::exp(nk * lr);
      acc += a[k] * mag * complexd(std::cos(nk * th), std::sin(nk * th));
    }
  }
  return acc;
}

// portable uniform; identical recipe to the library's sampler so that
// seeded runs visit the same points
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// angular closed form for the b1star kernel: (1/2pi) int |1-a e^{it}|^{-4} dt
inline double kernel_angular_average(double a2) {
  return (1.0 + a2) / std::pow(1.0 - a2, 3.0);
}

// b1star ratio for a radial weight, via the angular closed form and a 1-D
// radial sum
inline double b1star_radial(double alpha, double zmod, int nr = 400000) {
  double acc = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double rho = (i + 0.5) / nr;
    const double a2 = zmod * zmod * rho * rho;
    acc += 2.0 * rho * kernel_angular_average(a2) * std::pow(1.0 - rho * rho, alpha) / nr;
  }
  const double pref = std::pow(1.0 - zmod * zmod, 2.0);
  return pref * acc / std::pow(1.0 - zmod * zmod, alpha);
}

}  // namespace oracle
