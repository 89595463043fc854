#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace b2disc {

using complexd = std::complex<double>;

// The paper's metric writes squared pseudo-hyperbolic distance inside the
// log; Standard is the usual Poincare distance. Both are kept behind a flag
// and every report records which one was used.
enum class MetricConvention { PaperSquared, Standard };

std::string to_string(MetricConvention c);

// A point of the open unit disc. Construction with |z| >= 1 is rejected.
struct DiskPoint {
  double re = 0.0;
  double im = 0.0;

  DiskPoint() = default;
  DiskPoint(double re_, double im_);
  explicit DiskPoint(complexd z);

  complexd value() const { return complexd(re, im); }
  double abs2() const { return re * re + im * im; }
  double abs() const { return std::sqrt(abs2()); }
  double one_minus_abs2() const { return 1.0 - abs2(); }
};

// phi_z(zeta) = (z - zeta) / (1 - conj(z) zeta).  Involution: phi_z o phi_z = id.
struct MobiusMap {
  DiskPoint base;

  complexd apply(complexd zeta) const;
  DiskPoint apply(const DiskPoint& zeta) const;
  // phi_z'(zeta) = -(1 - |z|^2) / (1 - conj(z) zeta)^2
  complexd derivative(complexd zeta) const;
};

complexd mobius_apply(const MobiusMap& map, complexd zeta);
DiskPoint mobius_apply(const MobiusMap& map, const DiskPoint& zeta);

// Nontangential approach region |z - xi| < sigma (1 - |z|) at a boundary point.
struct StolzAngle {
  complexd vertex;
  double aperture;

  explicit StolzAngle(complexd xi, double sigma = kDefaultAperture);
  bool contains(complexd z) const;

  static constexpr double kDefaultAperture = 2.0;
};

// |phi_z(zeta)|, and 1 - |phi_z(zeta)|^2 through the identity
//   1 - |phi_z(zeta)|^2 = (1-|z|^2)(1-|zeta|^2)/|1 - conj(z) zeta|^2,
// which stays positive for interior points where the direct difference
// would cancel to zero.
double one_minus_rho2(complexd z, complexd zeta);
double pseudo_distance(complexd z, complexd zeta);

double hyperbolic_distance(complexd z, complexd zeta,
                           MetricConvention conv = MetricConvention::PaperSquared);
double hyperbolic_distance(const DiskPoint& z, const DiskPoint& zeta,
                           MetricConvention conv = MetricConvention::PaperSquared);

// n >= 2 points on the geodesic from z to zeta, endpoints included, equally
// spaced in hyperbolic arclength of the Standard metric. z == zeta gives n
// copies of z.
std::vector<DiskPoint> geodesic_sample(const DiskPoint& z, const DiskPoint& zeta, int n);

// Piecewise midpoint-rule approximation of int_gamma |dz|/(1-|z|^2).
double hyperbolic_length(const std::vector<DiskPoint>& path);

}  // namespace b2disc
