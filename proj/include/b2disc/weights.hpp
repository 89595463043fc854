#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "b2disc/bloch.hpp"
#include "b2disc/carleson.hpp"
#include "b2disc/geometry.hpp"

namespace b2disc::weights {

// s * log|xi - z| with xi = e^{i angle} on the boundary
struct PointSingularity {
  double angle = 0.0;
  double exponent = 0.0;
};

// Re(coef * z^freq) contribution to log w
struct TrigTerm {
  std::int64_t freq = 0;
  complexd coef{0.0, 0.0};
};

// Bounded remainder of log w after the radial and point-singularity parts
// are split off. Either an exact trig polynomial (fast synthesis on uniform
// angle grids) or a plain evaluator.
struct SmoothLogPart {
  std::function<double(complexd)> eval;
  std::vector<TrigTerm> trig;
  bool is_trig = false;
  double sup_bound = 0.0;
  std::vector<double> concentration_angles;  // boundary-scale variation spots
  std::string id;

  bool empty() const { return !eval && trig.empty(); }
  double operator()(complexd z) const;
  // largest frequency whose damped amplitude at depth t exceeds tol
  std::int64_t bandwidth(double t, double tol = 1e-6) const;
  // sum of damped amplitudes of frequencies above f at depth t
  double tail_amplitude(std::int64_t f, double t) const;
};

// Grid-sampled log-weight: bilinear in (r, theta); evaluation beyond the
// stored radius is refused (no extrapolation toward the boundary).
struct GridData {
  std::vector<double> radii;      // strictly increasing, < 1, starting at 0
  int angle_count = 0;
  std::vector<double> log_values;  // row-major [radius][angle]

  double eval(complexd z) const;
  static GridData load(const std::string& path);
  void save(const std::string& path) const;
};

// A positive weight on the disc held as
//   log w(z) = c + alpha log(1-|z|^2) + sum_i s_i log|xi_i - z| + smooth(z).
// Inverses, powers, scalings and Mobius pullbacks act exactly on the
// components, so w^{-1} is always a log negation and never a division.
class Weight {
 public:
  Weight() = default;  // w == 1

  static Weight one();
  static Weight radial_power(double alpha);                 // (1-|z|^2)^alpha
  static Weight point_power(double s, complexd xi0);         // |xi0 - z|^s
  // exp(Re(scale * g))
  static Weight exp_harmonic(const bloch::AnalyticFunction& g, complexd scale = 1.0);
  static Weight grid_sampled(GridData grid);
  static Weight from_log(std::function<double(complexd)> log_eval, double sup_bound,
                         std::string id);

  double log_eval(complexd z) const;
  double eval(complexd z) const { return std::exp(log_eval(z)); }

  Weight inverse() const;
  Weight power(double c) const;
  Weight scaled(double c) const;  // c * w, c > 0
  Weight pullback(const DiskPoint& z0) const;  // w o phi_{z0}

  double radial_exponent() const { return radial_; }
  double log_constant() const { return log_const_; }
  const std::vector<PointSingularity>& singular_points() const { return points_; }
  const SmoothLogPart& smooth() const { return smooth_; }

  bool pure_radial() const { return points_.empty() && smooth_.empty(); }
  bool log_bounded() const { return radial_ == 0.0 && points_.empty(); }
  // largest radius at which log_eval may be called (grid-sampled weights)
  double max_radius() const { return max_radius_; }

  std::string fingerprint() const;

 private:
  double radial_ = 0.0;
  double log_const_ = 0.0;
  std::vector<PointSingularity> points_;
  SmoothLogPart smooth_;
  std::shared_ptr<const GridData> grid_;
  double max_radius_ = 1.0;
};

struct B2ScanOptions {
  int max_level = 10;
  std::vector<double> shifts = carleson::kThirdShifts;
  int shell_depth = 15;         // dyadic shells kept below each box scale
  int angular_cap = 1 << 21;    // uniform-grid cap for oscillatory weights
  double rel_tol = 3e-5;        // shell truncation target
  std::string describe() const;
};

struct PairAverage {
  carleson::BoxAverage avg_w;
  carleson::BoxAverage avg_winv;
  double exponent_margin = 1.0;  // distance of local exponents to divergence
};

// Both averages of one box in a single pass.
PairAverage box_average_pair(const Weight& w, const carleson::CarlesonSquare& Q,
                             const B2ScanOptions& opts);

// (1/A(Q)) int_Q w dA for a Weight (spec-facing wrapper).
carleson::BoxAverage box_average(const Weight& w, const carleson::CarlesonSquare& Q,
                                 const B2ScanOptions& opts = {});

struct B2Report {
  double characteristic_sq = 1.0;  // sup of the average product; +inf when flagged
  carleson::QuadStatus status = carleson::QuadStatus::Converged;
  int max_level = 0;
  std::vector<double> shifts;
  carleson::SquareId argmax;
  double argmax_arc_length = 1.0;
  double argmax_arc_center = 0.0;
  std::vector<double> level_sup;       // cumulative sup through each level
  std::vector<double> per_level_sup;   // sup over boxes of exactly each level
  double growth_last = 0.0;            // relative growth across the last two levels
  std::string quadrature;
  std::string weight_id;
  MetricConvention convention = MetricConvention::PaperSquared;

  bool finite() const;
};

B2Report b2_characteristic(const Weight& w, const carleson::Arc& root, int max_level,
                           const B2ScanOptions& opts = {});
B2Report b2_characteristic(const Weight& w, int max_level = 10, const B2ScanOptions& opts = {});

// Computational B2 membership: converged scan, finite value, < 5% growth
// across the last two dyadic levels.
bool b2_member(const B2Report& report, double growth_tol = 0.05);

struct GammaReport {
  double value = 0.0;
  double lower = 0.0;       // largest t that failed the predicate
  double tol = 0.0;
  int max_level = 0;
  std::vector<std::pair<double, bool>> trace;  // (t, predicate)
  std::string weight_id;
};

// gamma(f) = inf { t > 0 : e^{f/t} in B2 } for f = log w.
GammaReport gamma(const Weight& w, double tol, int max_level = 10,
                  const B2ScanOptions& opts = {});

// least C with |log w(z) - log w(zeta)| <= C (1 + beta(z,zeta)) over samples
double oscillation_constant(const Weight& w, long pair_budget, std::uint64_t seed,
                            MetricConvention conv = MetricConvention::PaperSquared);

struct JNProfile {
  double arc_center = 0.0;
  double arc_length = 1.0;
  std::vector<double> lambda_grid;
  std::vector<double> tail_fraction;
  double eps_fit = 0.0;       // -1/slope of log tail vs lambda on the linear regime
  double stat_error = 0.0;    // 1/sqrt(samples)
  long samples = 0;
  std::uint64_t seed = 0;
};

JNProfile jn_profile(const Weight& w, const carleson::CarlesonSquare& Q,
                     const std::vector<double>& lambda_grid, long mc_samples,
                     std::uint64_t seed);

// sampled lower bound for ||log w||_{BMO(D)}
double bmo_disc_norm(const Weight& w, int disc_budget, int samples_per_disc,
                     std::uint64_t seed);

// max over sampled pairs of |log w(z) - log w(zeta)| - eps beta(z,zeta)
double epsilon_condition(const Weight& w, double eps, long pair_budget, std::uint64_t seed,
                         MetricConvention conv = MetricConvention::PaperSquared);

struct SarasonResult {
  double epsilon = 0.0;
  double variance = 0.0;
  bool bound_ok = false;
};

// finite probability space: (int w)(int w^{-1}) = 1 + eps, eps < 1 required;
// checks variance(log w) <= 4 eps
SarasonResult sarason_check(const std::vector<double>& weight_values,
                            const std::vector<double>& masses);

struct B1StarResult {
  double max_ratio = 0.0;
  carleson::QuadStatus status = carleson::QuadStatus::Converged;
  std::vector<std::pair<complexd, double>> ratios;
};

// max over the grid of int_D (w o phi_z) dA / w(z), via the substituted
// kernel (1-|z|^2)^2 / |1 - conj(z) zeta|^4
B1StarResult b1star_ratio(const Weight& w, const std::vector<complexd>& z_grid,
                          int radial_shells = 28, int angular_base = 96);

std::vector<B2Report> conformal_sweep(const Weight& w, const std::vector<complexd>& z_grid,
                                      int max_level, const B2ScanOptions& opts = {});

struct VanishingProfilePoint {
  double delta = 0.0;
  double value = 0.0;
  carleson::QuadStatus status = carleson::QuadStatus::Converged;
};

// for each delta: sup over scanned squares with A(Q) < delta of the product
std::vector<VanishingProfilePoint> vanishing_b2_profile(const Weight& w,
                                                        const std::vector<double>& delta_grid,
                                                        int max_level,
                                                        const B2ScanOptions& opts = {});

}  // namespace b2disc::weights
