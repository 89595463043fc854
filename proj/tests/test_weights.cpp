#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>

#include "b2disc/bloch.hpp"
#include "b2disc/sampling.hpp"
#include "b2disc/weights.hpp"
#include "oracles.hpp"

using namespace b2disc;
using namespace b2disc::weights;
using carleson::Arc;
using carleson::CarlesonSquare;
using carleson::QuadStatus;

TEST_CASE("log evaluation of the built-in families") {
  std::mt19937_64 rng(2);
  const auto w_rad = Weight::radial_power(0.7);
  const auto w_pt = Weight::point_power(1.3, complexd(0.0, 1.0));
  const auto g = bloch::AnalyticFunction::power_series(
      {complexd(0.2, 0.0), complexd(1.0, 0.0), complexd(0.0, 0.5)});
  const auto w_exp = Weight::exp_harmonic(g, complexd(0.8, -0.3));
  for (int k = 0; k < 200; ++k) {
    const complexd z = sample_disc(rng, 0.95);
    CHECK(w_rad.log_eval(z) ==
          doctest::Approx(0.7 * std::log(1.0 - std::norm(z))).epsilon(1e-12));
    CHECK(w_pt.log_eval(z) ==
          doctest::Approx(1.3 * std::log(std::abs(complexd(0.0, 1.0) - z))).epsilon(1e-12));
    const complexd gz = g.eval(z);
    CHECK(w_exp.log_eval(z) ==
          doctest::Approx((complexd(0.8, -0.3) * gz).real()).epsilon(1e-10));
  }
}

TEST_CASE("inverse and powers act on the log exactly") {
  const auto w = Weight::point_power(0.9, complexd(1.0, 0.0));
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const complexd z = sample_disc(rng, 0.9);
    CHECK(w.inverse().log_eval(z) == doctest::Approx(-w.log_eval(z)).epsilon(1e-14));
    CHECK(w.power(2.5).log_eval(z) == doctest::Approx(2.5 * w.log_eval(z)).epsilon(1e-14));
    CHECK(w.scaled(3.0).log_eval(z) ==
          doctest::Approx(w.log_eval(z) + std::log(3.0)).epsilon(1e-14));
  }
}

TEST_CASE("trivial weight: exact characteristic at every level") {
  const auto rep = b2_characteristic(Weight::one(), 10);
  CHECK(rep.status == QuadStatus::Converged);
  for (double v : rep.level_sup) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("radial powers: closed form and duality") {
  const auto w = Weight::radial_power(0.5);
  const auto rep = b2_characteristic(w, 10);
  CHECK(rep.status == QuadStatus::Converged);
  CHECK(rep.characteristic_sq == doctest::Approx(oracle::radial_b2_product(0.5)).epsilon(1e-12));
  CHECK(rep.growth_last < 0.02);  // stable from level to level (exactly constant here)

  // duality and scaling invariance are exact
  const auto rep_inv = b2_characteristic(w.inverse(), 10);
  CHECK(rep_inv.characteristic_sq == rep.characteristic_sq);
  const auto rep_scaled = b2_characteristic(w.scaled(7.25), 10);
  CHECK(rep_scaled.characteristic_sq == rep.characteristic_sq);

  // divergent outside |alpha| < 1
  CHECK(b2_characteristic(Weight::radial_power(1.0), 6).status == QuadStatus::Divergent);
  CHECK(b2_characteristic(Weight::radial_power(-1.2), 6).status == QuadStatus::Divergent);
}

TEST_CASE("generic engine agrees with the radial closed form") {
  // brute-force tensor oracle on assorted boxes, radial weight as a lambda
  const auto w = Weight::from_log(
      [](complexd z) { return 0.5 * std::log(1.0 - std::norm(z)); }, 10.0, "test-radial");
  for (double m : {0.5, 1.0 / 16}) {
    CarlesonSquare Q{Arc(1.2, m)};
    const auto pa = box_average_pair(w, Q, {});
    CHECK(pa.avg_w.value == doctest::Approx(oracle::radial_box_average(0.5, m)).epsilon(2e-4));
    CHECK(pa.avg_winv.value == doctest::Approx(oracle::radial_box_average(-0.5, m)).epsilon(2e-4));
  }
}

TEST_CASE("point singularity: characteristic, divergence, brute-force route") {
  const auto w = Weight::point_power(1.0, complexd(1.0, 0.0));
  const auto rep = b2_characteristic(w, 8);
  CHECK(rep.status == QuadStatus::Converged);
  CHECK(rep.characteristic_sq >= 1.0 - 1e-9);
  // frozen from the level-8 scan; edge-aligned boxes dominate centered ones
  CHECK(rep.characteristic_sq == doctest::Approx(1.8166).epsilon(0.01));
  CHECK(rep.growth_last < 0.01);

  // the argmax box value agrees with the naive tensor oracle
  {
    CarlesonSquare Q{Arc(rep.argmax_arc_center, rep.argmax_arc_length)};
    const auto pa = box_average_pair(w, Q, {});
    const double brute = oracle::brute_box_average(
        [](complexd z) { return std::abs(1.0 - z); }, rep.argmax_arc_center,
        rep.argmax_arc_length, 4000, 4000);
    CHECK(pa.avg_w.value == doctest::Approx(brute).epsilon(5e-3));
  }

  CHECK(b2_characteristic(Weight::point_power(-2.5, complexd(1.0, 0.0)), 5).status ==
        QuadStatus::Divergent);
  CHECK(b2_characteristic(Weight::point_power(2.5, complexd(1.0, 0.0)), 5).status ==
        QuadStatus::Divergent);
  CHECK(b2_characteristic(Weight::point_power(1.9, complexd(1.0, 0.0)), 5).status ==
        QuadStatus::Converged);
}

TEST_CASE("gamma: closed-form families") {
  // f == 0
  CHECK(gamma(Weight::one(), 0.01).value == doctest::Approx(0.0));
  // radial family: threshold exponent 1, so gamma = |alpha|
  for (double alpha : {0.5, 1.0, 1.5}) {
    const auto rep = gamma(Weight::radial_power(-alpha), 0.01, 10);
    CHECK(std::abs(rep.value - oracle::gamma_radial(alpha)) <= 0.011);
  }
  // point family: threshold 2
  {
    const auto rep = gamma(Weight::point_power(-1.0, complexd(1.0, 0.0)), 0.02, 7);
    CHECK(std::abs(rep.value - oracle::gamma_point(1.0)) <= 0.05);
  }
}

TEST_CASE("gamma homogeneity") {
  const auto base = Weight::radial_power(-0.8);
  const double tol = 0.005;
  const double g1 = gamma(base, tol, 9).value;
  for (double s : {2.0, 0.5}) {
    const double gs = gamma(base.power(s), tol, 9).value;
    CHECK(std::abs(gs - s * g1) <= 2.0 * tol + s * tol);
  }
}

TEST_CASE("oscillation constant") {
  CHECK(oscillation_constant(Weight::one(), 2000, 1) == doctest::Approx(0.0));
  // radial power alpha = 1: |log w(z)-log w(zeta)| <= ~2 beta + log 2
  CHECK(oscillation_constant(Weight::radial_power(1.0), 5000, 1) <= 2.1);
  // exp(Re z): Bloch seminorm 1
  const auto wexp = Weight::exp_harmonic(bloch::AnalyticFunction::monomial(), 1.0);
  CHECK(oscillation_constant(wexp, 5000, 1) <= 2.1);
  CHECK_THROWS_AS(oscillation_constant(Weight::one(), 10, 1), std::invalid_argument);
}

TEST_CASE("epsilon condition signatures") {
  CHECK(epsilon_condition(Weight::one(), 0.5, 2000, 1) == doctest::Approx(0.0));
  const auto w = Weight::radial_power(1.0);
  const double c_lo = epsilon_condition(w, 2.5, 20000, 1);
  const double c_hi = epsilon_condition(w, 0.5, 20000, 1);
  // slope 2.5 beats the radial oscillation slope 2: small stable constant
  CHECK(c_lo < 1.0);
  const double c_lo2 = epsilon_condition(w, 2.5, 40000, 1);
  CHECK(std::abs(c_lo2 - c_lo) <= 0.10 * std::max(c_lo, 0.1));
  // slope 0.5 leaves ~1.5 beta of growth over the deepest sampled pairs
  CHECK(c_hi > 10.0);
  CHECK(c_hi > 10.0 * std::max(c_lo, 0.05));
}

TEST_CASE("john-nirenberg profiles") {
  CarlesonSquare Q{Arc(0.0, 0.25)};
  // constant weight: zero tails
  {
    const auto prof = jn_profile(Weight::one(), Q, {0.1, 1.0, 2.0}, 20000, 3);
    for (double t : prof.tail_fraction) CHECK(t == 0.0);
  }
  // radial 0.5: the lemma bound 2 e^2 [w]^2 e^{-lambda} holds with 3 sigma slack
  {
    const auto w = Weight::radial_power(0.5);
    const double char_sq = oracle::radial_b2_product(0.5);
    const double lam0 = 2.0 + 0.5 * std::log(char_sq);
    std::vector<double> lams;
    for (int i = 0; i < 6; ++i) lams.push_back(lam0 + 0.5 + 3.5 * i / 5.0);
    const auto prof = jn_profile(w, Q, lams, 100000, 5);
    for (size_t i = 0; i < lams.size(); ++i) {
      const double bound = 2.0 * std::exp(2.0) * char_sq * std::exp(-lams[i]);
      const double sigma = std::sqrt(
          std::max(prof.tail_fraction[i] * (1 - prof.tail_fraction[i]), 1e-10) / 100000.0);
      CHECK(prof.tail_fraction[i] <= bound + 3.0 * sigma);
    }
    CHECK(prof.eps_fit > 0.0);
    // tails decrease in lambda
    for (size_t i = 1; i < prof.tail_fraction.size(); ++i) {
      CHECK(prof.tail_fraction[i] <= prof.tail_fraction[i - 1] + 1e-12);
    }
  }
  // nonconstant weight: tail at lambda = 0 is essentially 1
  {
    const auto prof = jn_profile(Weight::radial_power(0.5), Q, {0.0}, 20000, 7);
    CHECK(prof.tail_fraction[0] >= 0.99);
  }
  CHECK_THROWS_AS(jn_profile(Weight::one(), Q, {1.0}, 100, 1), std::invalid_argument);
}

TEST_CASE("bmo disc norm") {
  CHECK(bmo_disc_norm(Weight::one(), 200, 400, 1) == doctest::Approx(0.0));
  const auto wexp = Weight::exp_harmonic(bloch::AnalyticFunction::monomial(), 1.0);
  CHECK(bmo_disc_norm(wexp, 200, 500, 1) <= 2.0);
  const double v1 = bmo_disc_norm(Weight::radial_power(-1.0), 200, 1000, 1);
  const double v2 = bmo_disc_norm(Weight::radial_power(-1.0), 400, 2000, 1);
  CHECK(v1 >= 0.1);
  CHECK(v1 <= 3.0);
  CHECK(std::abs(v2 - v1) <= 0.10 * v1);
  CHECK_THROWS_AS(bmo_disc_norm(Weight::one(), 10, 10, 1), std::invalid_argument);
}

TEST_CASE("sarason variance bound") {
  // constant weight
  {
    const auto res = sarason_check({2.0, 2.0, 2.0}, {0.2, 0.3, 0.5});
    CHECK(res.epsilon == doctest::Approx(0.0));
    CHECK(res.variance == doctest::Approx(0.0));
    CHECK(res.bound_ok);
  }
  // two-point space: closed form cosh^2(delta) - 1
  {
    const double d = 0.1;
    const auto res = sarason_check({std::exp(d), std::exp(-d)}, {0.5, 0.5});
    CHECK(res.epsilon == doctest::Approx(std::cosh(d) * std::cosh(d) - 1.0).epsilon(1e-12));
    CHECK(res.variance == doctest::Approx(d * d).epsilon(1e-12));
    CHECK(res.bound_ok);
  }
  // hypothesis eps < 1 is enforced
  CHECK_THROWS_AS(sarason_check({std::exp(4.0), std::exp(-4.0)}, {0.5, 0.5}),
                  std::domain_error);
  CHECK_THROWS_AS(sarason_check({1.0, -1.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(sarason_check({1.0, 1.0}, {0.5, 0.4}), std::invalid_argument);

  // random admissible spaces: no violations
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + static_cast<int>(rng() % 10);
    std::vector<double> masses(n), values(n), logs(n);
    double total = 0;
    for (int i = 0; i < n; ++i) {
      masses[i] = 0.05 + uniform01(rng);
      total += masses[i];
      logs[i] = 2.0 * (uniform01(rng) - 0.5);
    }
    for (int i = 0; i < n; ++i) masses[i] /= total;
    double scale = 1.0;
    for (int tries = 0; tries < 64; ++tries) {
      double S = 0, T = 0;
      for (int i = 0; i < n; ++i) {
        S += masses[i] * std::exp(scale * logs[i]);
        T += masses[i] * std::exp(-scale * logs[i]);
      }
      if (S * T - 1.0 < 0.9) break;
      scale *= 0.7;
    }
    for (int i = 0; i < n; ++i) values[i] = std::exp(scale * logs[i]);
    const auto res = sarason_check(values, masses);
    CHECK(res.bound_ok);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("b1star ratios") {
  // w == 1: the substituted kernel integrates to 1 for every z
  {
    std::vector<complexd> grid{complexd(0, 0), complexd(0.5, 0), complexd(0, 0.8)};
    const auto res = b1star_ratio(Weight::one(), grid);
    CHECK(res.status == QuadStatus::Converged);
    for (const auto& [z, v] : res.ratios) CHECK(v == doctest::Approx(1.0).epsilon(2e-3));
  }
  // radial 0.5 at z = 0: int w dA / w(0) = closed form
  {
    const auto res = b1star_ratio(Weight::radial_power(0.5), {complexd(0, 0)});
    CHECK(res.ratios[0].second ==
          doctest::Approx(oracle::radial_box_average(0.5, 1.0)).epsilon(2e-3));
  }
  // bounded over |z| <= 0.95, matching the angular closed-form oracle
  {
    std::vector<complexd> grid;
    for (double r : {0.0, 0.5, 0.9, 0.95}) grid.emplace_back(r, 0.0);
    const auto res = b1star_ratio(Weight::radial_power(0.5), grid);
    CHECK(res.status == QuadStatus::Converged);
    CHECK(res.max_ratio < 1.0);
    for (size_t i = 0; i < grid.size(); ++i) {
      const double expect = oracle::b1star_radial(0.5, grid[i].real());
      CHECK(res.ratios[i].second == doctest::Approx(expect).epsilon(0.01));
    }
  }
  // divergence flag for non-integrable weights
  CHECK(b1star_ratio(Weight::radial_power(-1.5), {complexd(0, 0)}).status ==
        QuadStatus::Divergent);
}

TEST_CASE("conformal sweep boundedness") {
  // w == 1 pulls back to itself
  {
    const auto reps = conformal_sweep(Weight::one(), {complexd(0.3, 0), complexd(0, 0.7)}, 4);
    for (const auto& r : reps) CHECK(r.characteristic_sq == doctest::Approx(1.0).epsilon(1e-9));
  }
  // rotation: pullback at 0 of a radial weight keeps the exact characteristic
  {
    const auto reps = conformal_sweep(Weight::radial_power(0.5), {complexd(0.0, 0.0)}, 6);
    CHECK(reps[0].characteristic_sq ==
          doctest::Approx(oracle::radial_b2_product(0.5)).epsilon(1e-12));
  }
  // pullbacks along a radius stay finite with bounded spread
  {
    std::vector<complexd> grid;
    for (double r : {0.0, 0.3, 0.6, 0.9}) grid.emplace_back(r, 0.0);
    const auto reps = conformal_sweep(Weight::radial_power(0.5), grid, 6);
    double lo = 1e300, hi = 0.0;
    for (const auto& r : reps) {
      CHECK(r.status == QuadStatus::Converged);
      lo = std::min(lo, r.characteristic_sq);
      hi = std::max(hi, r.characteristic_sq);
    }
    CHECK(hi / lo < 10.0);
  }
}

TEST_CASE("vanishing profile distinguishes radial powers from little-Bloch") {
  std::vector<double> deltas;
  for (int L = 1; L <= 7; ++L) {
    const double h = std::pow(0.5, L);
    deltas.push_back(h * (1.0 - (1.0 - h) * (1.0 - h)) * 1.001);
  }
  {
    const auto prof = vanishing_b2_profile(Weight::one(), deltas, 8);
    for (const auto& p : prof) CHECK(p.value == doctest::Approx(1.0).epsilon(1e-9));
  }
  {
    // radial power: scale-invariant closed form, never approaches 1
    const auto prof = vanishing_b2_profile(Weight::radial_power(0.5), deltas, 8);
    for (const auto& p : prof) {
      CHECK(p.value == doctest::Approx(oracle::radial_b2_product(0.5)).epsilon(1e-12));
    }
  }
  {
    // little-Bloch exponential: profile decreasing toward 1
    std::vector<complexd> a;
    std::vector<std::int64_t> n;
    for (int k = 1; k <= 30; ++k) {
      a.emplace_back(1.0 / k, 0.0);
      n.push_back(std::int64_t(1) << k);
    }
    const auto w = Weight::exp_harmonic(bloch::AnalyticFunction::lacunary(a, n), 1.0);
    B2ScanOptions opts;
    opts.shell_depth = 12;
    const auto prof = vanishing_b2_profile(w, deltas, 7, opts);
    for (size_t i = 1; i < prof.size(); ++i) CHECK(prof[i].value <= prof[i - 1].value + 1e-9);
    CHECK(prof.back().value < prof.front().value);
  }
  CHECK_THROWS_AS(vanishing_b2_profile(Weight::one(), {0.1, 0.2}, 4), std::invalid_argument);
}

TEST_CASE("one-directional BMO -> B2 check") {
  // members of the test family with bmo norm <= 1 give finite characteristics
  // at the conservative exponent 0.1
  const auto f1 = Weight::exp_harmonic(bloch::AnalyticFunction::monomial(), 0.4);
  CHECK(bmo_disc_norm(f1, 150, 400, 2) <= 1.0);
  CHECK(b2_member(b2_characteristic(f1.power(0.1), 6)));

  const auto f2 = Weight::radial_power(-0.3);
  CHECK(bmo_disc_norm(f2, 150, 400, 2) <= 1.0);
  CHECK(b2_member(b2_characteristic(f2.power(0.1), 6)));
}

TEST_CASE("grid-sampled weights") {
  // sample radial 0.5 onto a grid
  GridData grid;
  const int nr = 64, na = 96;
  for (int i = 0; i < nr; ++i) grid.radii.push_back(0.995 * i / (nr - 1));
  grid.angle_count = na;
  for (int i = 0; i < nr; ++i) {
    for (int a = 0; a < na; ++a) {
      const double r = grid.radii[static_cast<size_t>(i)];
      grid.log_values.push_back(0.5 * std::log(1.0 - r * r));
    }
  }
  const auto w = Weight::grid_sampled(grid);
  CHECK(w.max_radius() == doctest::Approx(0.995));
  CHECK(w.log_eval(complexd(0.5, 0.0)) ==
        doctest::Approx(0.5 * std::log(0.75)).epsilon(1e-3));
  CHECK_THROWS_AS(w.log_eval(complexd(0.999, 0.0)), std::domain_error);

  // file round trip
  const std::string path = "/tmp/b2disc_test_grid.json";
  grid.save(path);
  const auto loaded = GridData::load(path);
  CHECK(loaded.radii.size() == grid.radii.size());
  CHECK(loaded.log_values == grid.log_values);
  std::remove(path.c_str());

  // box averages near the closed form on moderate boxes
  CarlesonSquare Q{Arc(0.0, 0.5)};
  const auto pa = box_average_pair(w, Q, {});
  CHECK(pa.avg_w.value == doctest::Approx(oracle::radial_box_average(0.5, 0.5)).epsilon(0.05));

  // sampling-restricted estimators still run
  CHECK(oscillation_constant(w, 2000, 1) <= 2.0);
}

TEST_CASE("b2 report metadata") {
  const auto rep = b2_characteristic(Weight::point_power(0.5, complexd(1.0, 0.0)), 5);
  CHECK(rep.max_level == 5);
  CHECK(rep.shifts.size() == 3);
  CHECK(rep.level_sup.size() == 6);
  CHECK(rep.per_level_sup.size() == 6);
  CHECK(rep.convention == MetricConvention::PaperSquared);
  // cumulative level sups are nondecreasing
  for (size_t i = 1; i < rep.level_sup.size(); ++i) {
    CHECK(rep.level_sup[i] >= rep.level_sup[i - 1]);
  }
}
