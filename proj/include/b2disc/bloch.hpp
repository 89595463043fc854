#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "b2disc/geometry.hpp"

namespace b2disc::bloch {

// Power-series objects with derivative evaluation. Three representations:
// dense Taylor coefficients, sparse lacunary terms (stable for huge
// exponents via exp(n log z)), and a small registry of closed forms.
class AnalyticFunction {
 public:
  enum class Kind { PowerSeries, Lacunary, LogOneMinus };

  static AnalyticFunction power_series(std::vector<complexd> coeffs);
  // sum a_k z^{n_k}, n strictly increasing, n_1 >= 1
  static AnalyticFunction lacunary(std::vector<complexd> a, std::vector<std::int64_t> n);
  // g(z) = -log(1 - conj(xi0) z), |xi0| = 1
  static AnalyticFunction log_one_minus(complexd xi0 = complexd(1.0, 0.0));
  static AnalyticFunction monomial();  // g(z) = z

  complexd eval(complexd z) const;
  complexd deriv(complexd z) const;

  // m-th Taylor coefficient of g'
  complexd deriv_coeff(std::int64_t m) const;

  Kind kind() const { return kind_; }
  const std::vector<complexd>& coefficients() const { return a_; }
  const std::vector<std::int64_t>& exponents() const { return n_; }
  complexd singular_point() const { return xi0_; }  // LogOneMinus only

  // scalar multiple c*g (used by spectral scaling laws)
  AnalyticFunction scaled(complexd c) const;

  std::string fingerprint() const;

 private:
  Kind kind_ = Kind::PowerSeries;
  std::vector<complexd> a_;       // coefficients (dense or lacunary)
  std::vector<std::int64_t> n_;   // lacunary exponents
  complexd xi0_{1.0, 0.0};
  complexd scale_{1.0, 0.0};      // closed-form prefactor
};

struct SeminormGrid {
  int max_depth = 24;      // radii up to 1 - 2^{-max_depth}
  int radii_per_octave = 4;
  int angular_base = 64;
  int angular_cap = 1 << 14;
};

struct SeminormResult {
  double value = 0.0;
  complexd argmax{0.0, 0.0};
};

// Grid lower bound for sup (1-|z|^2) |g'(z)|, converging upward with depth.
SeminormResult bloch_seminorm(const AnalyticFunction& g, const SeminormGrid& grid = {});

// per-radius sup of (1-|z|^2)|g'(z)|
std::vector<std::pair<double, double>> little_bloch_profile(const AnalyticFunction& g,
                                                            const std::vector<double>& radii,
                                                            int angular_base = 64,
                                                            int angular_cap = 1 << 14);

// A_k(M) = { 1/(M n_k) <= 1 - |z| <= M/n_k }
struct AnnulusFamily {
  double M = 2.0;
  std::vector<std::int64_t> n;

  std::pair<double, double> depth_range(int k) const;  // k is 1-based
  bool contains(int k, complexd z) const;
  bool in_union(complexd z) const;
  bool pairwise_disjoint_from(int k0) const;
};

enum class LacunarySpec { Factorial, SuperLacunary };

struct Counterexample {
  AnalyticFunction g;
  std::vector<std::int64_t> n;
  LacunarySpec spec;
  int terms;
};

// Lacunary function with a_k = 1 and super-lacunary exponents
// (n_{k+1}/n_k -> infinity). Fixed-ratio sequences are rejected.
Counterexample build_counterexample(LacunarySpec spec, int terms);

// validation helper exposed for custom sequences
void require_super_lacunary(const std::vector<std::int64_t>& n);

struct AnnulusFloor {
  double floor = 0.0;        // min over samples of (1-|z|^2)|z||g'(z)|
  double correction_lower;   // (4/n_j) sum_{k<j} n_k
  double correction_upper;   // (4/n_j) sum_{k>j} n_k (1 - 1/(2 n_j))^{n_k}
  double main_term;          // |a_j|/2 (1 - 2/n_j)^{n_j}
};

AnnulusFloor annulus_floor(const Counterexample& ce, int j, int samples, std::uint64_t seed,
                           double M = 2.0);

struct OffAnnuliSup {
  double value = 0.0;
  bool coverage_warning = false;  // grid entirely inside the annuli union
  complexd argmax{0.0, 0.0};
};

// sup of (1-|z|^2)|g'| over grid points outside the union of A_k(M)
OffAnnuliSup off_annuli_sup(const AnalyticFunction& g, const std::vector<std::int64_t>& n,
                            double M, int depth_nodes = 4000, int angular_nodes = 128,
                            double t_min = 0.0);

// K(eps, g) membership: (1-|z|^2)|g'(z)| > eps
bool level_set_member(const AnalyticFunction& g, double eps, complexd z);

struct AreaFunctionQuad {
  int radial_per_octave = 12;
  int angular_nodes = 192;
  std::vector<double> shell_breaks;  // extra radial break depths (annulus edges)
};

// sqrt of int over Gamma(xi) cap K(eps,g) cap {1-|z| >= delta} of dA/(1-|z|^2)^2
double area_function_truncated(const AnalyticFunction& g, double eps, complexd xi, double delta,
                               double aperture = StolzAngle::kDefaultAperture,
                               const AreaFunctionQuad& quad = {});

struct CauchyOscResult {
  double max_ratio = 0.0;
  int skipped = 0;  // points where the oscillation integral underflowed
  std::vector<std::pair<complexd, double>> ratios;
};

// max over the grid (3/4 < |z| < 1) of
//   (1-|z|^2)^2 |f'(z)|^2 / ((1/A(Q_z)) int_{Q_z} |Re f - mean|^2)
CauchyOscResult cauchyosc_ratio(const AnalyticFunction& f, const std::vector<complexd>& z_grid,
                                int radial_nodes = 160, int angular_nodes = 256);

}  // namespace b2disc::bloch
