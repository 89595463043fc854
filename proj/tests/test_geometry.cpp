#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "b2disc/geometry.hpp"
#include "b2disc/sampling.hpp"

using namespace b2disc;

namespace {

DiskPoint random_point(std::mt19937_64& rng, double max_mod = 0.99) {
  const double r = max_mod * std::sqrt(uniform01(rng));
  const double th = kTau * uniform01(rng);
  return DiskPoint(r * std::cos(th), r * std::sin(th));
}

}  // namespace

TEST_CASE("disk points reject moduli >= 1") {
  CHECK_THROWS_AS(DiskPoint(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DiskPoint(0.8, 0.7), std::invalid_argument);
  CHECK_NOTHROW(DiskPoint(0.999999, 0.0));
}

TEST_CASE("mobius map basics") {
  MobiusMap phi{DiskPoint(0.5, 0.0)};
  CHECK(std::abs(phi.apply(complexd(0.5, 0.0))) == doctest::Approx(0.0));
  // phi_0(zeta) = -zeta
  MobiusMap phi0{DiskPoint(0.0, 0.0)};
  CHECK(phi0.apply(complexd(0.3, 0.2)).real() == doctest::Approx(-0.3));
  CHECK(phi0.apply(complexd(0.3, 0.2)).imag() == doctest::Approx(-0.2));
  // direct evaluation: (0.5-0.25)/(1-0.125)
  CHECK(phi.apply(complexd(0.25, 0.0)).real() == doctest::Approx(0.25 / 0.875).epsilon(1e-12));
  // phi_z(0) = z
  CHECK(phi.apply(complexd(0.0, 0.0)).real() == doctest::Approx(0.5));
}

TEST_CASE("mobius involution pointwise") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const DiskPoint z = random_point(rng);
    const DiskPoint zeta = random_point(rng);
    MobiusMap phi{z};
    const complexd back = phi.apply(phi.apply(zeta.value()));
    CHECK(std::abs(back - zeta.value()) < 1e-12);
  }
}

TEST_CASE("hyperbolic distance values and symmetry") {
  const DiskPoint o(0.0, 0.0), half(0.5, 0.0);
  CHECK(hyperbolic_distance(o, o) == doctest::Approx(0.0));
  // 0.5 log(1.25/0.75)
  CHECK(hyperbolic_distance(o, half, MetricConvention::PaperSquared) ==
        doctest::Approx(0.5 * std::log(1.25 / 0.75)).epsilon(1e-12));
  CHECK(hyperbolic_distance(o, half, MetricConvention::Standard) ==
        doctest::Approx(std::atanh(0.5)).epsilon(1e-12));

  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    const DiskPoint z = random_point(rng), zeta = random_point(rng);
    for (auto conv : {MetricConvention::PaperSquared, MetricConvention::Standard}) {
      CHECK(hyperbolic_distance(z, zeta, conv) ==
            doctest::Approx(hyperbolic_distance(zeta, z, conv)).epsilon(1e-13));
    }
  }
}

TEST_CASE("mobius invariance of the metric") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const DiskPoint a = random_point(rng), z = random_point(rng), zeta = random_point(rng);
    MobiusMap phi{a};
    for (auto conv : {MetricConvention::PaperSquared, MetricConvention::Standard}) {
      const double d1 = hyperbolic_distance(z, zeta, conv);
      const double d2 = hyperbolic_distance(phi.apply(z), phi.apply(zeta), conv);
      CHECK(std::abs(d1 - d2) < 1e-9);
    }
  }
}

TEST_CASE("monotone in the pseudo-hyperbolic distance") {
  double prev_p = -1.0, prev_s = -1.0;
  for (double rho = 0.01; rho < 0.999; rho += 0.013) {
    const DiskPoint o(0.0, 0.0), z(rho, 0.0);
    const double p = hyperbolic_distance(o, z, MetricConvention::PaperSquared);
    const double s = hyperbolic_distance(o, z, MetricConvention::Standard);
    CHECK(p > prev_p);
    CHECK(s > prev_s);
    prev_p = p;
    prev_s = s;
  }
}

TEST_CASE("comparability of the two conventions") {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 500; ++k) {
    const DiskPoint z = random_point(rng), zeta = random_point(rng);
    const double p = hyperbolic_distance(z, zeta, MetricConvention::PaperSquared);
    const double s = hyperbolic_distance(z, zeta, MetricConvention::Standard);
    CHECK(p <= 2.0 * s + 1e-12);
    CHECK(s <= 2.0 * p + std::log(2.0) + 1e-12);
  }
}

TEST_CASE("triangle inequality holds for the standard convention") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 500; ++k) {
    const DiskPoint x = random_point(rng), y = random_point(rng), z = random_point(rng);
    const double xy = hyperbolic_distance(x, y, MetricConvention::Standard);
    const double yz = hyperbolic_distance(y, z, MetricConvention::Standard);
    const double xz = hyperbolic_distance(x, z, MetricConvention::Standard);
    CHECK(xz <= xy + yz + 1e-11);
  }
}

TEST_CASE("no infinity for valid near-boundary points") {
  const DiskPoint deep(1.0 - 1e-14, 0.0);
  const DiskPoint other(-(1.0 - 1e-14), 0.0);
  for (auto conv : {MetricConvention::PaperSquared, MetricConvention::Standard}) {
    const double d = hyperbolic_distance(deep, other, conv);
    CHECK(std::isfinite(d));
    CHECK(d > 10.0);
  }
}

TEST_CASE("geodesic sampling") {
  const DiskPoint o(0.0, 0.0), r(0.7, 0.0);
  auto two = geodesic_sample(o, r, 2);
  CHECK(two.front().value() == o.value());
  CHECK(two.back().value() == r.value());

  auto constant = geodesic_sample(r, r, 5);
  CHECK(constant.size() == 5);
  for (const auto& p : constant) CHECK(p.value() == r.value());

  // geodesic through 0 stays on a diameter
  auto diam = geodesic_sample(o, DiskPoint(0.3, 0.4), 9);
  for (const auto& p : diam) {
    CHECK(std::abs(p.re * 0.4 - p.im * 0.3) < 1e-12);
  }

  // midpoint of a symmetric segment is the origin
  auto sym = geodesic_sample(DiskPoint(-0.6, 0.0), DiskPoint(0.6, 0.0), 3);
  CHECK(std::abs(sym[1].value()) < 1e-12);

  CHECK_THROWS_AS(geodesic_sample(o, r, 1), std::invalid_argument);
}

TEST_CASE("hyperbolic length of sampled paths") {
  // radial path 0 -> 0.9: atanh(0.9) under fine sampling
  const int n = 10001;
  std::vector<DiskPoint> path;
  path.reserve(n);
  for (int i = 0; i < n; ++i) path.emplace_back(0.9 * i / (n - 1), 0.0);
  CHECK(hyperbolic_length(path) == doctest::Approx(std::atanh(0.9)).epsilon(1e-6));

  std::vector<DiskPoint> rev(path.rbegin(), path.rend());
  CHECK(hyperbolic_length(rev) == doctest::Approx(hyperbolic_length(path)).epsilon(1e-14));

  std::vector<DiskPoint> constant(4, DiskPoint(0.3, 0.1));
  CHECK(hyperbolic_length(constant) == doctest::Approx(0.0));

  // geodesic_sample + length recover the standard distance
  auto geo = geodesic_sample(DiskPoint(0.2, 0.1), DiskPoint(-0.5, 0.3), 4000);
  CHECK(hyperbolic_length(geo) ==
        doctest::Approx(hyperbolic_distance(DiskPoint(0.2, 0.1), DiskPoint(-0.5, 0.3),
                                            MetricConvention::Standard))
            .epsilon(1e-6));
}

TEST_CASE("stolz angles") {
  CHECK_THROWS_AS(StolzAngle(complexd(0.5, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(StolzAngle(complexd(1.0, 0.0), 1.0), std::invalid_argument);
  StolzAngle g(complexd(1.0, 0.0), 2.0);
  for (double s = 0.05; s < 1.0; s += 0.05) {
    CHECK(g.contains(complexd(1.0 - s, 0.0)));
  }
  CHECK_FALSE(g.contains(complexd(0.0, 0.9)));
}
