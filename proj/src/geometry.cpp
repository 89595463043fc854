#include "b2disc/geometry.hpp"

#include <cmath>

namespace b2disc {

std::string to_string(MetricConvention c) {
  return c == MetricConvention::PaperSquared ? "paper-squared" : "standard";
}

DiskPoint::DiskPoint(double re_, double im_) : re(re_), im(im_) {
  if (!(re * re + im * im < 1.0)) {
    throw std::invalid_argument("DiskPoint: modulus must be strictly less than 1");
  }
}

DiskPoint::DiskPoint(complexd z) : DiskPoint(z.real(), z.imag()) {}

complexd MobiusMap::apply(complexd zeta) const {
  const complexd z = base.value();
  return (z - zeta) / (1.0 - std::conj(z) * zeta);
}

DiskPoint MobiusMap::apply(const DiskPoint& zeta) const {
  complexd w = apply(zeta.value());
  // Mobius maps send the open disc to itself; roundoff can land a hair
  // outside when both points hug the boundary.
  double a = std::abs(w);
  if (a >= 1.0) w *= (1.0 - 1e-16) / a;
  return DiskPoint(w);
}

complexd MobiusMap::derivative(complexd zeta) const {
  const complexd z = base.value();
  const complexd d = 1.0 - std::conj(z) * zeta;
  return -(1.0 - std::norm(z)) / (d * d);
}

complexd mobius_apply(const MobiusMap& map, complexd zeta) { return map.apply(zeta); }
DiskPoint mobius_apply(const MobiusMap& map, const DiskPoint& zeta) { return map.apply(zeta); }

StolzAngle::StolzAngle(complexd xi, double sigma) : vertex(xi), aperture(sigma) {
  const double m = std::abs(xi);
  if (std::abs(m - 1.0) > 1e-12) {
    throw std::invalid_argument("StolzAngle: vertex must have modulus 1");
  }
  vertex = xi / m;
  if (!(sigma > 1.0)) {
    throw std::invalid_argument("StolzAngle: aperture must exceed 1");
  }
}

bool StolzAngle::contains(complexd z) const {
  return std::abs(z - vertex) < aperture * (1.0 - std::abs(z));
}

double one_minus_rho2(complexd z, complexd zeta) {
  const double a = 1.0 - std::norm(z);
  const double b = 1.0 - std::norm(zeta);
  const double d = std::norm(1.0 - std::conj(z) * zeta);
  return a * b / d;
}

double pseudo_distance(complexd z, complexd zeta) {
  const double q = one_minus_rho2(z, zeta);
  return std::sqrt(std::max(0.0, 1.0 - q));
}

double hyperbolic_distance(complexd z, complexd zeta, MetricConvention conv) {
  const double q = one_minus_rho2(z, zeta);  // = 1 - rho^2, stable near rho = 1
  if (q >= 1.0) return 0.0;
  if (conv == MetricConvention::PaperSquared) {
    // (1 + rho^2) / (1 - rho^2) = (2 - q) / q
    return 0.5 * std::log((2.0 - q) / q);
  }
  // (1 + rho) / (1 - rho) = (1 + rho)^2 / q
  const double rho = std::sqrt(1.0 - q);
  return 0.5 * std::log((1.0 + rho) * (1.0 + rho) / q);
}

double hyperbolic_distance(const DiskPoint& z, const DiskPoint& zeta, MetricConvention conv) {
  return hyperbolic_distance(z.value(), zeta.value(), conv);
}

std::vector<DiskPoint> geodesic_sample(const DiskPoint& z, const DiskPoint& zeta, int n) {
  if (n < 2) throw std::invalid_argument("geodesic_sample: n must be >= 2");
  std::vector<DiskPoint> out;
  out.reserve(static_cast<size_t>(n));

  const MobiusMap to_origin{z};
  const complexd w = to_origin.apply(zeta.value());
  const double rho = std::abs(w);
  if (rho == 0.0) {
    out.assign(static_cast<size_t>(n), z);
    return out;
  }
  // In the phi_z chart the geodesic is the radial segment [0, w]; equal
  // hyperbolic steps are equal steps in atanh(r).
  const complexd dir = w / rho;
  const double total = std::atanh(rho);
  for (int k = 0; k < n; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
    const double r = std::tanh(s);
    out.push_back(to_origin.apply(DiskPoint(r * dir)));
  }
  out.front() = z;
  out.back() = zeta;
  return out;
}

double hyperbolic_length(const std::vector<DiskPoint>& path) {
  if (path.size() < 2) throw std::invalid_argument("hyperbolic_length: need at least 2 points");
  double total = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const complexd a = path[i].value();
    const complexd b = path[i + 1].value();
    const complexd m = 0.5 * (a + b);
    total += std::abs(b - a) / (1.0 - std::norm(m));
  }
  return total;
}

}  // namespace b2disc
