#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "b2disc/geometry.hpp"

namespace b2disc::carleson {

inline constexpr double kTwoPi = 6.28318530717958647692528676656;

// Boundary arc in normalized length: m(circle) = 1.
struct Arc {
  double center_angle = 0.0;  // radians, reduced to [0, 2pi)
  double length = 1.0;        // normalized, in (0, 1]

  Arc() = default;
  Arc(double center, double len);

  complexd center_point() const;  // xi(I)
  bool contains_angle(double theta) const;
  // signed angular offset of theta from the arc center, in radians, in (-pi, pi]
  double offset(double theta) const;
};

// Q_I = { z != 0 : z/|z| in I, 1 - |z| < m(I) }, normalized area A(disc) = 1.
struct CarlesonSquare {
  Arc arc;

  CarlesonSquare() = default;
  explicit CarlesonSquare(Arc a) : arc(a) {}

  double area() const;           // m(I) (1 - (1 - m(I))^2)
  complexd anchor() const;       // z_Q = (1 - m(I)) xi(I)
  double top_half_area() const;  // area of T_I = { z in Q : 1 - |z| >= m(I)/2 }
  bool contains(complexd z) const;
  bool in_top_half(complexd z) const;
};

// Dyadic generations of a root arc. A nonzero shift rotates the whole grid
// by shift * m(root); wrap-around is only meaningful for the full circle.
struct DyadicTree {
  Arc root;
  double shift = 0.0;

  std::int64_t count_at(int level) const;  // 2^level
  Arc arc_at(int level, std::int64_t index) const;
};

struct TopHalfTile {
  CarlesonSquare square;
  int level = 0;
  std::int64_t index = 0;
  double area = 0.0;  // area of the top half T_J
};

struct Tiling {
  std::vector<TopHalfTile> tiles;
  double residual_area = 0.0;  // outer annular strip not covered by depth generations
};

// Top halves of generations 0..depth of Q's arc; the tile areas plus the
// residual strip add up to area(Q).
Tiling tile_top_halves(const CarlesonSquare& Q, int depth);

enum class QuadScheme { TopHalfTiling, PolarTensor };

struct BoxQuadrature {
  QuadScheme scheme = QuadScheme::PolarTensor;
  int radial_levels = 18;  // dyadic depth shells below the box scale
  int angular_base = 48;   // base angular nodes per shell
  int refine = 0;          // extra refinement steps (shells + angular doubling)

  std::string describe() const;
};

enum class QuadStatus { Converged, Inconclusive, Divergent };

std::string to_string(QuadStatus s);

struct BoxAverage {
  double value = 0.0;
  QuadStatus status = QuadStatus::Converged;
  double rel_change = 0.0;  // between the last two refinement stages
};

// Explicit nodes/weights on Q; the weights add up to area(Q) exactly (cell
// areas are closed-form and telescope).
struct QuadRule {
  std::vector<complexd> nodes;
  std::vector<double> weights;
};

QuadRule build_rule(const CarlesonSquare& Q, const BoxQuadrature& quad);

// (1/A(Q)) int_Q w dA for a plain evaluator, with refinement-based
// convergence classification. Divergence is a flagged value, not an error,
// so supremum scans can report failure instead of aborting.
BoxAverage box_average(const std::function<double(complexd)>& w, const CarlesonSquare& Q,
                       const BoxQuadrature& quad);

struct SquareId {
  int level = 0;
  std::int64_t index = 0;
  double shift = 0.0;
};

struct SupScanResult {
  double value = 0.0;
  QuadStatus status = QuadStatus::Converged;
  SquareId argmax;
  Arc argmax_arc;
  std::vector<double> level_sup;  // cumulative sup through each level
};

inline const std::vector<double> kThirdShifts = {0.0, 1.0 / 3.0, 2.0 / 3.0};

// Max of F over all dyadic squares of the shifted grids down to max_level.
// Divergent F values swamp the scan: status propagates, value is the
// running sup of finite evaluations.
SupScanResult dyadic_sup_scan(const std::function<BoxAverage(const CarlesonSquare&)>& F,
                              const Arc& root, int max_level,
                              const std::vector<double>& shifts = kThirdShifts);

// Value-only convenience overload.
SupScanResult dyadic_sup_scan(const std::function<double(const CarlesonSquare&)>& F,
                              const Arc& root, int max_level,
                              const std::vector<double>& shifts = kThirdShifts);

// JSON-backed map (weight-id, square-id, level) -> average.
class QuadratureCache {
 public:
  QuadratureCache() = default;

  static QuadratureCache load(const std::string& path);
  void save(const std::string& path) const;

  std::optional<double> get(const std::string& weight_id, const SquareId& sq, int level) const;
  void put(const std::string& weight_id, const SquareId& sq, int level, double value);
  std::size_t size() const { return entries_.size(); }

 private:
  static std::string key(const std::string& weight_id, const SquareId& sq, int level);
  std::map<std::string, double> entries_;
};

}  // namespace b2disc::carleson
