#include "b2disc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "b2disc/sampling.hpp"
#include "json.hpp"

namespace b2disc::weights {

using carleson::Arc;
using carleson::BoxAverage;
using carleson::CarlesonSquare;
using carleson::QuadStatus;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 4-point Gauss-Legendre on [0,1]
constexpr double kGLx[4] = {0.06943184420297371, 0.33000947820757187, 0.66999052179242813,
                            0.93056815579702629};
constexpr double kGLw[4] = {0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
                            0.17392742256872693};

double reduce_angle(double theta) {
  double t = std::fmod(theta, kTau);
  if (t < 0) t += kTau;
  return t;
}

// ln|1 - u z| as a trig polynomial sum Re(-u^n/n z^n), truncated at 1e-16
std::vector<TrigTerm> log_abs_one_minus_series(complexd u) {
  std::vector<TrigTerm> terms;
  const double au = std::abs(u);
  if (au < 1e-300) return terms;
  complexd p = u;
  for (std::int64_t n = 1;; ++n) {
    if (std::abs(p) / static_cast<double>(n) < 1e-16) break;
    if (n > 200000) break;
    terms.push_back({n, -p / static_cast<double>(n)});
    p *= u;
  }
  return terms;
}

}  // namespace

double SmoothLogPart::operator()(complexd z) const {
  if (eval) return eval(z);
  if (!is_trig) return 0.0;
  double acc = 0.0;
  for (const auto& t : trig) {
    complexd zn = std::pow(z, static_cast<double>(t.freq));
    acc += (t.coef * zn).real();
  }
  return acc;
}

std::int64_t SmoothLogPart::bandwidth(double t, double tol) const {
  std::int64_t best = 0;
  for (const auto& term : trig) {
    const double damped = std::abs(term.coef) *
                          std::exp(-static_cast<double>(term.freq) * std::max(t, 0.0));
    if (damped > tol) best = std::max(best, term.freq);
  }
  return best;
}

double SmoothLogPart::tail_amplitude(std::int64_t f, double t) const {
  double acc = 0.0;
  for (const auto& term : trig) {
    if (term.freq <= f) continue;
    acc += std::abs(term.coef) * std::exp(-static_cast<double>(term.freq) * std::max(t, 0.0));
  }
  return acc;
}

double GridData::eval(complexd z) const {
  const double r = std::abs(z);
  if (radii.empty() || angle_count <= 0) throw std::runtime_error("GridData: empty grid");
  if (r > radii.back() + 1e-12) {
    throw std::domain_error("GridData: evaluation beyond stored radius");
  }
  const double th = reduce_angle(std::atan2(z.imag(), z.real()));
  // radial bracket
  size_t hi = std::lower_bound(radii.begin(), radii.end(), r) - radii.begin();
  if (hi == 0) hi = 1;
  if (hi >= radii.size()) hi = radii.size() - 1;
  const size_t lo = hi - 1;
  const double fr = (r - radii[lo]) / std::max(radii[hi] - radii[lo], 1e-300);
  // angular bracket (periodic)
  const double ta = th / kTau * angle_count;
  const auto ia = static_cast<std::int64_t>(std::floor(ta));
  const double fa = ta - static_cast<double>(ia);
  const auto a0 = static_cast<size_t>(((ia % angle_count) + angle_count) % angle_count);
  const size_t a1 = (a0 + 1) % static_cast<size_t>(angle_count);

  const auto at = [&](size_t ri, size_t ai) {
    return log_values[ri * static_cast<size_t>(angle_count) + ai];
  };
  const double v0 = (1 - fa) * at(lo, a0) + fa * at(lo, a1);
  const double v1 = (1 - fa) * at(hi, a0) + fa * at(hi, a1);
  return (1 - fr) * v0 + fr * v1;
}

GridData GridData::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("GridData: cannot open " + path);
  nlohmann::json j;
  in >> j;
  GridData g;
  g.radii = j.at("radii").get<std::vector<double>>();
  g.angle_count = j.at("angle_count").get<int>();
  g.log_values = j.at("log_values").get<std::vector<double>>();
  if (j.contains("normalization") && j["normalization"] != "log") {
    throw std::runtime_error("GridData: unsupported normalization");
  }
  if (g.log_values.size() != g.radii.size() * static_cast<size_t>(g.angle_count)) {
    throw std::runtime_error("GridData: value count mismatch");
  }
  return g;
}

void GridData::save(const std::string& path) const {
  nlohmann::json j;
  j["radii"] = radii;
  j["angle_count"] = angle_count;
  j["normalization"] = "log";
  j["log_values"] = log_values;
  std::ofstream out(path);
  out << j.dump() << "\n";
}

Weight Weight::one() { return Weight(); }

Weight Weight::radial_power(double alpha) {
  Weight w;
  w.radial_ = alpha;
  return w;
}

Weight Weight::point_power(double s, complexd xi0) {
  const double m = std::abs(xi0);
  if (std::abs(m - 1.0) > 1e-12) {
    throw std::invalid_argument("point_power: xi0 must lie on the unit circle");
  }
  Weight w;
  w.points_.push_back({reduce_angle(std::arg(xi0)), s});
  return w;
}

Weight Weight::exp_harmonic(const bloch::AnalyticFunction& g, complexd scale) {
  Weight w;
  using Kind = bloch::AnalyticFunction::Kind;
  if (g.kind() == Kind::LogOneMinus) {
    // Re(scale * (-log(1 - conj(xi0) z))): point part -Re(scale) ln|xi0 - z|
    // plus the bounded conjugate piece Im(scale) arg(1 - conj(xi0) z).
    const complexd xi0 = g.singular_point();
    const double ang = reduce_angle(std::arg(xi0));
    const complexd eff = scale;  // AnalyticFunction's own scale folds into eval below
    w.points_.push_back({ang, -eff.real()});
    const double im = eff.imag();
    w.smooth_.sup_bound = std::abs(im) * kTau / 4.0;
    w.smooth_.concentration_angles.push_back(ang);
    w.smooth_.eval = [xi0, im](complexd z) {
      return im * std::arg(1.0 - std::conj(xi0) * z);
    };
    std::ostringstream os;
    os.precision(17);
    os << "argpart[" << ang << ";" << im << "]";
    w.smooth_.id = os.str();
    return w;
  }
  // series: log w = sum Re(scale * a_k z^{n_k}) exactly
  std::vector<TrigTerm> trig;
  double bound = 0.0;
  const auto& a = g.coefficients();
  if (g.kind() == Kind::Lacunary) {
    const auto& n = g.exponents();
    for (size_t k = 0; k < a.size(); ++k) {
      const complexd c = scale * a[k];
      if (std::abs(c) < 1e-300) continue;
      trig.push_back({n[k], c});
      bound += std::abs(c);
    }
  } else {
    for (size_t k = 1; k < a.size(); ++k) {
      const complexd c = scale * a[k];
      if (std::abs(c) < 1e-300) continue;
      trig.push_back({static_cast<std::int64_t>(k), c});
      bound += std::abs(c);
    }
    if (!a.empty()) w.log_const_ = (scale * a[0]).real();
  }
  w.smooth_.trig = std::move(trig);
  w.smooth_.is_trig = true;
  w.smooth_.sup_bound = bound;
  w.smooth_.id = "trig[" + g.fingerprint() + "]*scale";
  {
    std::ostringstream os;
    os.precision(17);
    os << w.smooth_.id << "(" << scale.real() << "," << scale.imag() << ")";
    w.smooth_.id = os.str();
  }
  const auto terms = w.smooth_.trig;
  w.smooth_.eval = [terms](complexd z) {
    double acc = 0.0;
    const double az = std::abs(z);
    const double lz = az > 0 ? std::log(az) : -700.0;
    const double th = std::arg(z);
    for (const auto& t : terms) {
      const double n = static_cast<double>(t.freq);
      const double mag = std::exp(n * lz);
      if (mag < 1e-18) continue;
      const double c = std::cos(n * th), s = std::sin(n * th);
      acc += mag * (t.coef.real() * c - t.coef.imag() * s);
    }
    return acc;
  };
  return w;
}

Weight Weight::grid_sampled(GridData grid) {
  Weight w;
  auto g = std::make_shared<GridData>(std::move(grid));
  w.grid_ = g;
  w.max_radius_ = g->radii.back();
  double bound = 0.0;
  for (double v : g->log_values) bound = std::max(bound, std::abs(v));
  w.smooth_.sup_bound = bound;
  w.smooth_.eval = [g](complexd z) { return g->eval(z); };
  std::ostringstream os;
  os << "grid[nr=" << g->radii.size() << ",na=" << g->angle_count << ",rmax=" << g->radii.back()
     << "]";
  w.smooth_.id = os.str();
  return w;
}

Weight Weight::from_log(std::function<double(complexd)> log_eval, double sup_bound,
                        std::string id) {
  Weight w;
  w.smooth_.eval = std::move(log_eval);
  w.smooth_.sup_bound = sup_bound;
  w.smooth_.id = std::move(id);
  return w;
}

double Weight::log_eval(complexd z) const {
  double acc = log_const_;
  if (radial_ != 0.0) {
    const double q = 1.0 - std::norm(z);
    acc += radial_ * std::log(std::max(q, 1e-300));
  }
  for (const auto& p : points_) {
    const complexd xi(std::cos(p.angle), std::sin(p.angle));
    acc += p.exponent * std::log(std::max(std::abs(xi - z), 1e-300));
  }
  if (!smooth_.empty()) acc += smooth_(z);
  return acc;
}

Weight Weight::inverse() const { return power(-1.0); }

Weight Weight::power(double c) const {
  Weight w = *this;
  w.radial_ *= c;
  w.log_const_ *= c;
  for (auto& p : w.points_) p.exponent *= c;
  if (!w.smooth_.empty()) {
    auto base = smooth_.eval;
    if (base) {
      w.smooth_.eval = [base, c](complexd z) { return c * base(z); };
    }
    for (auto& t : w.smooth_.trig) t.coef *= c;
    w.smooth_.sup_bound = std::abs(c) * smooth_.sup_bound;
    std::ostringstream os;
    os.precision(17);
    os << smooth_.id << "^" << c;
    w.smooth_.id = os.str();
  }
  return w;
}

Weight Weight::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("Weight::scaled: factor must be positive");
  Weight w = *this;
  w.log_const_ += std::log(c);
  return w;
}

Weight Weight::pullback(const DiskPoint& z0) const {
  if (grid_) throw std::invalid_argument("pullback of grid-sampled weights is not supported");
  const complexd a = z0.value();
  Weight w;
  w.radial_ = radial_;
  w.log_const_ = log_const_;

  std::vector<TrigTerm> trig;
  double bound = 0.0;
  double constant = 0.0;

  if (radial_ != 0.0) {
    // log(1-|phi_{z0}|^2) = log(1-|z0|^2) + log(1-|zeta|^2) - 2 ln|1 - conj(z0) zeta|
    constant += radial_ * std::log(z0.one_minus_abs2());
    for (const auto& t : log_abs_one_minus_series(std::conj(a))) {
      trig.push_back({t.freq, -2.0 * radial_ * t.coef});
    }
  }
  for (const auto& p : points_) {
    // |xi - phi_{z0}(zeta)| = |zeta - phi_{z0}(xi)| |1 - xi conj(z0)| / |1 - conj(z0) zeta|
    const complexd xi(std::cos(p.angle), std::sin(p.angle));
    const complexd xi_new = (a - xi) / (1.0 - std::conj(a) * xi);
    w.points_.push_back({reduce_angle(std::arg(xi_new)), p.exponent});
    constant += p.exponent * std::log(std::abs(1.0 - xi * std::conj(a)));
    for (const auto& t : log_abs_one_minus_series(std::conj(a))) {
      trig.push_back({t.freq, -p.exponent * t.coef});
    }
  }
  w.log_const_ += constant;

  // inner smooth part composed with the Mobius map
  std::function<double(complexd)> inner;
  double inner_bound = 0.0;
  std::string inner_id;
  std::vector<double> conc;
  if (!smooth_.empty()) {
    auto base_eval = smooth_.eval;
    SmoothLogPart base_copy = smooth_;
    inner = [base_copy, a](complexd zeta) {
      const complexd mapped = (a - zeta) / (1.0 - std::conj(a) * zeta);
      return base_copy(mapped);
    };
    inner_bound = smooth_.sup_bound;
    inner_id = smooth_.id + "(o phi)";
    for (double ang : smooth_.concentration_angles) {
      const complexd xi(std::cos(ang), std::sin(ang));
      const complexd xi_new = (a - xi) / (1.0 - std::conj(a) * xi);
      conc.push_back(reduce_angle(std::arg(xi_new)));
    }
  }

  for (const auto& t : trig) bound += std::abs(t.coef);
  w.smooth_.trig = trig;
  w.smooth_.is_trig = trig.empty() ? false : !inner;  // exact only without a lambda part
  w.smooth_.sup_bound = bound + inner_bound;
  w.smooth_.concentration_angles = conc;
  {
    std::ostringstream os;
    os.precision(17);
    os << "pullback[" << fingerprint() << ";" << a.real() << "," << a.imag() << "]";
    w.smooth_.id = os.str();
  }
  if (!trig.empty() || inner) {
    auto tt = trig;
    w.smooth_.eval = [tt, inner](complexd z) {
      double acc = 0.0;
      for (const auto& t : tt) {
        acc += (t.coef * std::pow(z, static_cast<double>(t.freq))).real();
      }
      if (inner) acc += inner(z);
      return acc;
    };
  }
  return w;
}

std::string Weight::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << "rad:" << radial_ << "|c:" << log_const_;
  for (const auto& p : points_) os << "|pt:" << p.angle << "^" << p.exponent;
  if (!smooth_.empty()) os << "|sm:" << smooth_.id;
  if (grid_) os << "|rmax:" << max_radius_;
  return os.str();
}

std::string B2ScanOptions::describe() const {
  std::ostringstream os;
  os << "dyadic:max_level=" << max_level << ",shifts=" << shifts.size()
     << ",shell_depth=" << shell_depth << ",angular_cap=" << angular_cap;
  return os.str();
}

namespace {

struct SideState {
  std::vector<double> inc;
  double total = 0.0;
  QuadStatus status = QuadStatus::Converged;
  double margin = 1.0;  // local-exponent distance to divergence
};

// exact integrability classification from the component exponents
void classify_side(const Weight& w, const CarlesonSquare& Q, double sign, SideState& st) {
  const double alpha = sign * w.radial_exponent();
  double margin = alpha + 1.0;
  const double half = 0.5 * Q.arc.length * kTau;
  for (const auto& p : w.singular_points()) {
    if (std::abs(Q.arc.offset(p.angle)) <= half + 1e-14) {
      margin = std::min(margin, alpha + sign * p.exponent + 2.0);
    }
  }
  st.margin = margin;
  if (margin <= 0.0) {
    st.status = QuadStatus::Divergent;
  } else if (margin < 0.02) {
    st.status = QuadStatus::Inconclusive;
  }
}

// geometric slope of the tail of shell increments
void finish_side(SideState& st, double area, BoxAverage& out) {
  if (st.status == QuadStatus::Divergent) {
    out.status = QuadStatus::Divergent;
    out.value = kInf;
    return;
  }
  const int n = static_cast<int>(st.inc.size());
  double tail = 0.0;
  double rel = 0.0;
  if (n >= 4 && st.total > 0.0) {
    int window = std::min(n, 10);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = n - window; i < n; ++i) {
      if (st.inc[i] <= 0.0 || st.inc[i] < 1e-300 * st.total) continue;
      const double x = i, y = std::log2(st.inc[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++cnt;
    }
    if (cnt >= 3) {
      const double denom = cnt * sxx - sx * sx;
      const double slope = denom != 0 ? (cnt * sxy - sx * sy) / denom : 0.0;
      if (slope <= -0.02) {
        const double r = std::pow(2.0, slope);
        tail = st.inc.back() * r / (1.0 - r);
      } else if (st.inc.back() > 1e-9 * st.total) {
        // tail не settled: flag unless exactness says otherwise
        if (st.status == QuadStatus::Converged) st.status = QuadStatus::Inconclusive;
      }
    }
    rel = st.inc.back() / std::max(st.total, 1e-300);
  }
  if (out.status != QuadStatus::Divergent) {
    out.value = (st.total + tail) / area;
    out.status = std::max(out.status, st.status);
    out.rel_change = rel;
  }
}

// angular cells of one radial shell: geometric refinement around the
// interest offsets, bandwidth-driven splitting elsewhere
struct InterestAngle {
  double offset;  // radians from the arc center
  double core;    // innermost cell half-width
};

std::vector<double> build_cells(double half, const std::vector<InterestAngle>& interest,
                                double max_width) {
  std::vector<double> edges{-half, half};
  for (const auto& ia : interest) {
    for (double e = ia.core; e < 2.0 * half; e *= 2.0) {
      const double a = ia.offset - e, b = ia.offset + e;
      if (a > -half && a < half) edges.push_back(a);
      if (b > -half && b < half) edges.push_back(b);
    }
    if (ia.offset > -half && ia.offset < half) edges.push_back(ia.offset);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-300; }),
              edges.end());
  // enforce the bandwidth cap
  std::vector<double> out;
  out.push_back(edges.front());
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int p = 1; p <= pieces; ++p) out.push_back(a + (b - a) * p / pieces);
  }
  return out;
}

}  // namespace

PairAverage box_average_pair(const Weight& w, const CarlesonSquare& Q,
                             const B2ScanOptions& opts) {
  PairAverage res;
  const double m = Q.arc.length;
  const double A = Q.area();

  if (w.pure_radial()) {
    const double alpha = w.radial_exponent();
    const double u = 1.0 - (1.0 - m) * (1.0 - m);
    const double c = w.log_constant();
    auto side = [&](double sign) {
      BoxAverage b;
      const double a = sign * alpha;
      if (a <= -1.0) {
        b.status = QuadStatus::Divergent;
        b.value = kInf;
      } else {
        b.value = std::exp(sign * c) * std::pow(u, a) / (a + 1.0);
      }
      return b;
    };
    res.avg_w = side(1.0);
    res.avg_winv = side(-1.0);
    res.exponent_margin = 1.0 - std::abs(alpha);
    return res;
  }

  SideState plus, minus;
  classify_side(w, Q, 1.0, plus);
  classify_side(w, Q, -1.0, minus);
  res.exponent_margin = std::min(plus.margin, minus.margin);
  if (plus.status == QuadStatus::Divergent || minus.status == QuadStatus::Divergent) {
    finish_side(plus, A, res.avg_w);
    finish_side(minus, A, res.avg_winv);
    return res;
  }

  // interest angles: singular points and declared concentration spots
  const double half = 0.5 * m * kTau;
  const double reach = half + 16.0 * m * kTau;  // nearby off-arc singularities still matter

  const int shells_max = std::min(64, 4 * opts.shell_depth);
  const double rel_stop = opts.rel_tol;
  const double t_floor = 1.0 - w.max_radius();

  for (int i = 0; i < shells_max; ++i) {
    const double t_hi = m * std::pow(0.5, i);
    const double t_lo = 0.5 * t_hi;
    if (w.max_radius() < 1.0 && t_lo < t_floor && i > 0) break;
    const double r_lo = 1.0 - t_hi, r_hi = 1.0 - t_lo;
    const double u_lo = r_lo * r_lo, u_hi = r_hi * r_hi;

    std::vector<InterestAngle> interest;
    for (const auto& p : w.singular_points()) {
      const double d = Q.arc.offset(p.angle);
      if (std::abs(d) <= reach) interest.push_back({d, std::max(t_lo, 1e-300)});
    }
    for (double ang : w.smooth().concentration_angles) {
      const double d = Q.arc.offset(ang);
      if (std::abs(d) <= reach) interest.push_back({d, std::max(t_lo, 1e-300)});
    }
    const std::int64_t bw = w.smooth().bandwidth(t_lo, 1e-7);
    const double max_width =
        std::min(2.0 * half / 8.0, bw > 0 ? kTau / (4.0 * static_cast<double>(bw)) : kTau);
    const std::vector<double> cells = build_cells(half, interest, max_width);

    double inc_p = 0.0, inc_m = 0.0;
    for (size_t ci = 0; ci + 1 < cells.size(); ++ci) {
      const double ca = cells[ci], cb = cells[ci + 1];
      const double width = cb - ca;
      for (int a = 0; a < 4; ++a) {
        const double uu = u_lo + kGLx[a] * (u_hi - u_lo);
        const double r = std::sqrt(uu);
        const double wu = kGLw[a] * (u_hi - u_lo);
        for (int b = 0; b < 4; ++b) {
          const double th = Q.arc.center_angle + ca + kGLx[b] * width;
          const double lw = w.log_eval(complexd(r * std::cos(th), r * std::sin(th)));
          const double cell_measure = wu * kGLw[b] * width / kTau;
          const double ew = std::exp(lw);
          inc_p += cell_measure * ew;
          inc_m += cell_measure / ew;
        }
      }
    }
    plus.inc.push_back(inc_p);
    plus.total += inc_p;
    minus.inc.push_back(inc_m);
    minus.total += inc_m;

    if (i >= 10 && inc_p < rel_stop * plus.total && inc_m < rel_stop * minus.total) break;
  }

  finish_side(plus, A, res.avg_w);
  finish_side(minus, A, res.avg_winv);
  return res;
}

carleson::BoxAverage box_average(const Weight& w, const CarlesonSquare& Q,
                                 const B2ScanOptions& opts) {
  return box_average_pair(w, Q, opts).avg_w;
}

bool B2Report::finite() const {
  return status != QuadStatus::Divergent && std::isfinite(characteristic_sq);
}

namespace {

void track_box(B2Report& rep, double product, QuadStatus st, int level, std::int64_t index,
               double shift, const Arc& arc, double& level_value, bool& any_inc,
               bool& any_div) {
  if (st == QuadStatus::Divergent) {
    any_div = true;
    rep.argmax = {level, index, shift};
    rep.argmax_arc_length = arc.length;
    rep.argmax_arc_center = arc.center_angle;
    return;
  }
  if (st == QuadStatus::Inconclusive) any_inc = true;
  level_value = std::max(level_value, product);
  if (product > rep.characteristic_sq) {
    rep.characteristic_sq = product;
    rep.argmax = {level, index, shift};
    rep.argmax_arc_length = arc.length;
    rep.argmax_arc_center = arc.center_angle;
  }
}

void finish_report(B2Report& rep, bool any_inc, bool any_div) {
  const size_t L = rep.level_sup.size();
  if (L >= 2 && rep.level_sup[L - 2] > 0 && std::isfinite(rep.level_sup[L - 1])) {
    rep.growth_last = rep.level_sup[L - 1] / rep.level_sup[L - 2] - 1.0;
  }
  rep.status = any_div ? QuadStatus::Divergent
                       : (any_inc ? QuadStatus::Inconclusive : QuadStatus::Converged);
  if (any_div) rep.characteristic_sq = kInf;
}

// per-cell integrals over one radial shell with windowed (arc) sums;
// fractional end cells enter by linear share
struct ShellCells {
  std::vector<double> cell;
  std::vector<double> pref;

  void build() {
    pref.assign(cell.size() + 1, 0.0);
    for (size_t i = 0; i < cell.size(); ++i) pref[i + 1] = pref[i] + cell[i];
  }

  double piece(double a, double b) const {
    const auto M = static_cast<std::int64_t>(cell.size());
    auto ia = static_cast<std::int64_t>(std::floor(a));
    auto ib = static_cast<std::int64_t>(std::floor(b));
    ia = std::clamp<std::int64_t>(ia, 0, M - 1);
    ib = std::clamp<std::int64_t>(ib, 0, M);
    if (ia == ib) return (b - a) * cell[static_cast<size_t>(ia)];
    double s = (static_cast<double>(ia) + 1.0 - a) * cell[static_cast<size_t>(ia)];
    s += pref[static_cast<size_t>(std::min(ib, M))] - pref[static_cast<size_t>(ia + 1)];
    if (ib < M) s += (b - static_cast<double>(ib)) * cell[static_cast<size_t>(ib)];
    return s;
  }

  // x in cell units; window length <= M, wrap-around allowed
  double window(double x0, double x1) const {
    const auto Md = static_cast<double>(cell.size());
    double a = std::fmod(x0, Md);
    if (a < 0) a += Md;
    const double b = a + (x1 - x0);
    if (b <= Md) return piece(a, b);
    return piece(a, Md) + piece(0.0, b - Md);
  }
};

// window-sum scan for bounded-log weights on the full circle: each shell is
// evaluated once on a global uniform angle grid and every box reads off its
// arc window, so the cost is shared across all boxes of a level.
void scan_smooth_full(const Weight& w, int max_level, const B2ScanOptions& opts, B2Report& rep) {
  bool any_inc = false, any_div = false;
  const double t_floor = 1.0 - w.max_radius();
  const bool trig = w.smooth().is_trig;
  const auto& terms = w.smooth().trig;
  const double c0 = w.log_constant();

  for (int L = 0; L <= max_level; ++L) {
    const std::int64_t nb = std::int64_t(1) << L;
    const double h = 1.0 / static_cast<double>(nb);
    const size_t nshift = opts.shifts.size();
    std::vector<double> Ip(nshift * static_cast<size_t>(nb), 0.0);
    std::vector<double> Im(nshift * static_cast<size_t>(nb), 0.0);
    ShellCells lastP, lastM;
    double last_shell_u = 0.0;
    int used_shells = 0;

    std::vector<double> lw;
    for (int j = 0; j < opts.shell_depth; ++j) {
      const double t_hi = h * std::pow(0.5, j);
      const double t_lo = 0.5 * t_hi;
      if (w.max_radius() < 1.0 && t_lo < t_floor && j > 0) break;
      const double r_lo = 1.0 - t_hi, r_hi = 1.0 - t_lo;
      const double u_lo = r_lo * r_lo, u_hi = r_hi * r_hi;

      const std::int64_t bw = trig ? w.smooth().bandwidth(t_lo, 1e-6) : 256;
      std::int64_t M = 64;
      while (M < 32 * nb || M < 4 * bw) M <<= 1;
      M = std::min<std::int64_t>(M, opts.angular_cap);

      ShellCells P, Mi;
      P.cell.assign(static_cast<size_t>(M), 0.0);
      Mi.cell.assign(static_cast<size_t>(M), 0.0);
      lw.assign(static_cast<size_t>(M), 0.0);

      for (int a = 0; a < 4; ++a) {
        const double uu = u_lo + kGLx[a] * (u_hi - u_lo);
        const double r = std::sqrt(uu);
        const double wu = kGLw[a] * (u_hi - u_lo);
        std::fill(lw.begin(), lw.end(), c0);
        if (trig) {
          const double lr = std::log(r);
          const double dth = kTau / static_cast<double>(M);
          for (const auto& t : terms) {
            const double n = static_cast<double>(t.freq);
            const double mag = std::exp(n * lr);
            const double amp = std::abs(t.coef) * mag;
            if (amp < 1e-9) continue;
            const complexd step(std::cos(n * dth), std::sin(n * dth));
            complexd rot =
                t.coef * mag * complexd(std::cos(n * 0.5 * dth), std::sin(n * 0.5 * dth));
            for (std::int64_t mm = 0; mm < M; ++mm) {
              lw[static_cast<size_t>(mm)] += rot.real();
              rot *= step;
              if ((mm & 4095) == 4095) {
                const double cur = std::abs(rot);
                if (cur > 0) rot *= amp / cur;  // recurrence drift
              }
            }
          }
        } else {
          for (std::int64_t mm = 0; mm < M; ++mm) {
            const double th = (static_cast<double>(mm) + 0.5) * kTau / static_cast<double>(M);
            lw[static_cast<size_t>(mm)] +=
                w.smooth()(complexd(r * std::cos(th), r * std::sin(th)));
          }
        }
        for (std::int64_t mm = 0; mm < M; ++mm) {
          const double ew = std::exp(lw[static_cast<size_t>(mm)]);
          P.cell[static_cast<size_t>(mm)] += wu * ew;
          Mi.cell[static_cast<size_t>(mm)] += wu / ew;
        }
      }
      P.build();
      Mi.build();

      const double invM = 1.0 / static_cast<double>(M);
      for (size_t si = 0; si < nshift; ++si) {
        const double s = opts.shifts[si];
        for (std::int64_t bI = 0; bI < nb; ++bI) {
          const double x0 =
              (static_cast<double>(bI) + s) * static_cast<double>(M) / static_cast<double>(nb);
          const double x1 = x0 + static_cast<double>(M) / static_cast<double>(nb);
          Ip[si * static_cast<size_t>(nb) + static_cast<size_t>(bI)] += P.window(x0, x1) * invM;
          Im[si * static_cast<size_t>(nb) + static_cast<size_t>(bI)] += Mi.window(x0, x1) * invM;
        }
      }
      lastP = std::move(P);
      lastM = std::move(Mi);
      last_shell_u = u_hi - u_lo;
      ++used_shells;
    }

    // residual strip: extend with the deepest shell's angular profile, which
    // is accurate because bounded log-weights flatten radially at the boundary
    double residual_scale = 0.0;
    if (used_shells > 0 && last_shell_u > 0.0) {
      const double t_last_lo = h * std::pow(0.5, used_shells);
      const double r_in = 1.0 - t_last_lo;
      residual_scale = (1.0 - r_in * r_in) / last_shell_u;
    }

    double level_value = 0.0;
    const double A = h * (1.0 - (1.0 - h) * (1.0 - h));
    const auto Mlast = static_cast<std::int64_t>(lastP.cell.size());
    for (size_t si = 0; si < nshift; ++si) {
      const double s = opts.shifts[si];
      for (std::int64_t bI = 0; bI < nb; ++bI) {
        double ip = Ip[si * static_cast<size_t>(nb) + static_cast<size_t>(bI)];
        double im = Im[si * static_cast<size_t>(nb) + static_cast<size_t>(bI)];
        if (residual_scale > 0.0 && Mlast > 0) {
          const double x0 = (static_cast<double>(bI) + s) * static_cast<double>(Mlast) /
                            static_cast<double>(nb);
          const double x1 = x0 + static_cast<double>(Mlast) / static_cast<double>(nb);
          ip += lastP.window(x0, x1) / static_cast<double>(Mlast) * residual_scale;
          im += lastM.window(x0, x1) / static_cast<double>(Mlast) * residual_scale;
        }
        const double product = (ip / A) * (im / A);
        const Arc arc = carleson::DyadicTree{Arc(0.0, 1.0), s}.arc_at(L, bI);
        track_box(rep, product, QuadStatus::Converged, L, bI, s, arc, level_value, any_inc,
                  any_div);
      }
    }
    rep.per_level_sup.push_back(level_value);
    rep.level_sup.push_back(rep.characteristic_sq);
  }
  finish_report(rep, any_inc, any_div);
}

}  // namespace

B2Report b2_characteristic(const Weight& w, const Arc& root, int max_level,
                           const B2ScanOptions& opts) {
  if (max_level < 0 || max_level > 20) {
    throw std::invalid_argument("b2_characteristic: max_level must lie in [0, 20]");
  }
  B2Report rep;
  rep.characteristic_sq = 0.0;
  rep.max_level = max_level;
  rep.shifts = opts.shifts;
  rep.quadrature = opts.describe();
  rep.weight_id = w.fingerprint();

  if (w.pure_radial()) {
    const double alpha = w.radial_exponent();
    if (std::abs(alpha) >= 1.0) {
      rep.status = QuadStatus::Divergent;
      rep.characteristic_sq = kInf;
      rep.level_sup.assign(static_cast<size_t>(max_level) + 1, kInf);
      rep.per_level_sup = rep.level_sup;
      return rep;
    }
    const double v = 1.0 / ((1.0 + alpha) * (1.0 - alpha));
    rep.characteristic_sq = v;
    rep.level_sup.assign(static_cast<size_t>(max_level) + 1, v);
    rep.per_level_sup = rep.level_sup;
    rep.argmax = {0, 0, opts.shifts.empty() ? 0.0 : opts.shifts[0]};
    rep.argmax_arc_length = root.length;
    rep.argmax_arc_center = root.center_angle;
    rep.growth_last = 0.0;
    rep.status = QuadStatus::Converged;
    return rep;
  }

  const bool full_circle = root.length == 1.0;
  if (full_circle && w.log_bounded()) {
    scan_smooth_full(w, max_level, opts, rep);
    return rep;
  }

  bool any_inc = false, any_div = false;
  for (int L = 0; L <= max_level; ++L) {
    double level_value = 0.0;
    for (double s : opts.shifts) {
      carleson::DyadicTree tree{root, s};
      const std::int64_t n = tree.count_at(L);
      for (std::int64_t j = 0; j < n; ++j) {
        const Arc arc = tree.arc_at(L, j);
        CarlesonSquare Q(arc);
        PairAverage pa = box_average_pair(w, Q, opts);
        const QuadStatus st = std::max(pa.avg_w.status, pa.avg_winv.status);
        const double product = pa.avg_w.value * pa.avg_winv.value;
        track_box(rep, product, st, L, j, s, arc, level_value, any_inc, any_div);
      }
    }
    rep.per_level_sup.push_back(level_value);
    rep.level_sup.push_back(rep.characteristic_sq);
  }
  finish_report(rep, any_inc, any_div);
  return rep;
}

B2Report b2_characteristic(const Weight& w, int max_level, const B2ScanOptions& opts) {
  return b2_characteristic(w, Arc(0.0, 1.0), max_level, opts);
}

bool b2_member(const B2Report& report, double growth_tol) {
  return report.status == QuadStatus::Converged && report.finite() &&
         report.growth_last < growth_tol;
}

GammaReport gamma(const Weight& w, double tol, int max_level, const B2ScanOptions& opts) {
  if (!(tol > 0.0)) throw std::invalid_argument("gamma: tol must be positive");
  GammaReport rep;
  rep.tol = tol;
  rep.max_level = max_level;
  rep.weight_id = w.fingerprint();

  B2ScanOptions o = opts;
  o.max_level = max_level;
  const auto member = [&](double t) {
    const B2Report r = b2_characteristic(w.power(1.0 / t), Arc(0.0, 1.0), max_level, o);
    const bool ok = b2_member(r);
    rep.trace.emplace_back(t, ok);
    return ok;
  };

  if (member(tol)) {
    rep.value = 0.0;
    rep.lower = 0.0;
    return rep;
  }
  double lo = tol, hi = std::max(1.0, 2.0 * tol);
  while (!member(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw std::runtime_error("gamma: no B2 membership found up to t = 1e9");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (member(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  rep.value = hi;
  rep.lower = lo;
  return rep;
}

namespace {

// fixed pair battery: boundary-clustered rays plus quasi-random pairs
struct PairSampler {
  std::vector<complexd> battery;
  double t_min;

  PairSampler(double t_min_, double t_max, int angles, int depths) : t_min(t_min_) {
    for (int a = 0; a < angles; ++a) {
      const double th = kTau * a / angles;
      for (int d = 0; d < depths; ++d) {
        const double t = t_max * std::pow(t_min_ / t_max, static_cast<double>(d) / (depths - 1));
        battery.push_back((1.0 - t) * complexd(std::cos(th), std::sin(th)));
      }
    }
  }

  complexd random_point(std::mt19937_64& rng) const {
    const double t = std::exp(std::log(t_min) +
                              uniform01(rng) * (std::log(0.5) - std::log(t_min)));
    const double th = kTau * uniform01(rng);
    return (1.0 - t) * complexd(std::cos(th), std::sin(th));
  }
};

}  // namespace

double oscillation_constant(const Weight& w, long pair_budget, std::uint64_t seed,
                            MetricConvention conv) {
  if (pair_budget < 1000) {
    throw std::invalid_argument("oscillation_constant: pair_budget must be >= 1e3");
  }
  const double t_min = std::max(1e-9, 1.0 - w.max_radius());
  PairSampler sampler(t_min, 0.4, 16, 28);
  double best = 0.0;
  std::vector<double> logs;
  logs.reserve(sampler.battery.size());
  for (complexd z : sampler.battery) logs.push_back(w.log_eval(z));
  for (size_t i = 0; i < sampler.battery.size(); ++i) {
    for (size_t j = i + 1; j < sampler.battery.size(); ++j) {
      const double beta = hyperbolic_distance(sampler.battery[i], sampler.battery[j], conv);
      best = std::max(best, std::abs(logs[i] - logs[j]) / (1.0 + beta));
    }
  }
  std::mt19937_64 rng(seed);
  for (long k = 0; k < pair_budget; ++k) {
    const complexd z = sampler.random_point(rng);
    const complexd zeta = sampler.random_point(rng);
    const double beta = hyperbolic_distance(z, zeta, conv);
    best = std::max(best, std::abs(w.log_eval(z) - w.log_eval(zeta)) / (1.0 + beta));
  }
  return best;
}

double epsilon_condition(const Weight& w, double eps, long pair_budget, std::uint64_t seed,
                         MetricConvention conv) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon_condition: eps must be positive");
  const double t_min = std::max(1e-9, 1.0 - w.max_radius());
  PairSampler sampler(t_min, 0.4, 16, 28);
  double best = 0.0;
  std::vector<double> logs;
  logs.reserve(sampler.battery.size());
  for (complexd z : sampler.battery) logs.push_back(w.log_eval(z));
  for (size_t i = 0; i < sampler.battery.size(); ++i) {
    for (size_t j = i + 1; j < sampler.battery.size(); ++j) {
      const double beta = hyperbolic_distance(sampler.battery[i], sampler.battery[j], conv);
      best = std::max(best, std::abs(logs[i] - logs[j]) - eps * beta);
    }
  }
  std::mt19937_64 rng(seed);
  for (long k = 0; k < pair_budget; ++k) {
    const complexd z = sampler.random_point(rng);
    const complexd zeta = sampler.random_point(rng);
    const double beta = hyperbolic_distance(z, zeta, conv);
    best = std::max(best, std::abs(w.log_eval(z) - w.log_eval(zeta)) - eps * beta);
  }
  return best;
}

JNProfile jn_profile(const Weight& w, const CarlesonSquare& Q,
                     const std::vector<double>& lambda_grid, long mc_samples,
                     std::uint64_t seed) {
  if (mc_samples < 10000) throw std::invalid_argument("jn_profile: mc_samples must be >= 1e4");
  JNProfile prof;
  prof.arc_center = Q.arc.center_angle;
  prof.arc_length = Q.arc.length;
  prof.lambda_grid = lambda_grid;
  prof.samples = mc_samples;
  prof.seed = seed;
  prof.stat_error = 1.0 / std::sqrt(static_cast<double>(mc_samples));

  std::mt19937_64 rng(seed);
  const double m = Q.arc.length;
  const double r_lo = 1.0 - m;
  std::vector<double> vals;
  vals.reserve(static_cast<size_t>(mc_samples));
  double mean = 0.0;
  const double cap_r = w.max_radius() < 1.0 ? w.max_radius() : 1.0;
  for (long k = 0; k < mc_samples; ++k) {
    const double u = uniform01(rng);
    double r = std::sqrt(r_lo * r_lo + u * (1.0 - r_lo * r_lo));
    if (r >= cap_r) r = cap_r - 1e-12;
    const double th = Q.arc.center_angle + (uniform01(rng) - 0.5) * m * kTau;
    const double v = w.log_eval(complexd(r * std::cos(th), r * std::sin(th)));
    vals.push_back(v);
    mean += v;
  }
  mean /= static_cast<double>(mc_samples);

  prof.tail_fraction.reserve(lambda_grid.size());
  for (double lam : lambda_grid) {
    long cnt = 0;
    for (double v : vals) {
      if (std::abs(v - mean) > lam) ++cnt;
    }
    prof.tail_fraction.push_back(static_cast<double>(cnt) / static_cast<double>(mc_samples));
  }

  // least-squares slope of log(tail) on the linear regime
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  const double floor_frac = std::max(10.0 / static_cast<double>(mc_samples), 1e-5);
  for (size_t i = 0; i < lambda_grid.size(); ++i) {
    const double f = prof.tail_fraction[i];
    if (f < floor_frac || f > 0.25) continue;
    const double x = lambda_grid[i], y = std::log(f);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double denom = cnt * sxx - sx * sx;
    const double slope = denom != 0 ? (cnt * sxy - sx * sy) / denom : 0.0;
    prof.eps_fit = slope < 0 ? -1.0 / slope : 0.0;
  }
  return prof;
}

double bmo_disc_norm(const Weight& w, int disc_budget, int samples_per_disc,
                     std::uint64_t seed) {
  if (disc_budget < 100 || samples_per_disc < 100) {
    throw std::invalid_argument("bmo_disc_norm: budgets must be >= 1e2");
  }
  std::mt19937_64 rng(seed);
  double best = 0.0;
  const double cap_r = w.max_radius();
  for (int d = 0; d < disc_budget; ++d) {
    // quasi-uniform centre, log-uniform radius in [(1-|zc|)/8, 2]
    complexd zc = sample_disc(rng, std::min(0.999999, cap_r));
    const double rmin = (1.0 - std::abs(zc)) / 8.0;
    const double R = std::exp(std::log(rmin) + uniform01(rng) * (std::log(2.0) - std::log(rmin)));

    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(samples_per_disc));
    double mean = 0.0;
    long guard = 0;
    while (static_cast<int>(vals.size()) < samples_per_disc &&
           guard < 200L * samples_per_disc) {
      ++guard;
      const double rr = R * std::sqrt(uniform01(rng));
      const double tt = kTau * uniform01(rng);
      const complexd z = zc + rr * complexd(std::cos(tt), std::sin(tt));
      if (std::abs(z) >= cap_r) continue;
      const double v = w.log_eval(z);
      vals.push_back(v);
      mean += v;
    }
    if (vals.size() < 16) continue;
    mean /= static_cast<double>(vals.size());
    double osc = 0.0;
    for (double v : vals) osc += std::abs(v - mean);
    osc /= static_cast<double>(vals.size());
    best = std::max(best, osc);
  }
  return best;
}

SarasonResult sarason_check(const std::vector<double>& weight_values,
                            const std::vector<double>& masses) {
  if (weight_values.size() != masses.size() || weight_values.empty()) {
    throw std::invalid_argument("sarason_check: weights and masses must match and be nonempty");
  }
  double mass = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("sarason_check: masses must be nonnegative");
    mass += m;
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("sarason_check: masses must sum to 1");
  }
  double S = 0.0, T = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < masses.size(); ++i) {
    const double wv = weight_values[i];
    if (!(wv > 0.0)) throw std::invalid_argument("sarason_check: weights must be positive");
    S += masses[i] * wv;
    T += masses[i] / wv;
    const double lw = std::log(wv);
    m1 += masses[i] * lw;
    m2 += masses[i] * lw * lw;
  }
  SarasonResult res;
  res.epsilon = std::max(0.0, S * T - 1.0);
  if (res.epsilon >= 1.0) {
    throw std::domain_error("sarason_check: requires (int w)(int 1/w) = 1 + eps with eps < 1");
  }
  res.variance = std::max(0.0, m2 - m1 * m1);
  res.bound_ok = res.variance <= 4.0 * res.epsilon + 1e-12;
  return res;
}

B1StarResult b1star_ratio(const Weight& w, const std::vector<complexd>& z_grid,
                          int radial_shells, int angular_base) {
  B1StarResult res;
  // exact divergence of int_D w dA from the component exponents
  if (w.radial_exponent() <= -1.0) {
    res.status = QuadStatus::Divergent;
    res.max_ratio = kInf;
    return res;
  }
  for (const auto& p : w.singular_points()) {
    if (w.radial_exponent() + p.exponent <= -2.0) {
      res.status = QuadStatus::Divergent;
      res.max_ratio = kInf;
      return res;
    }
  }

  for (complexd z : z_grid) {
    const double az2 = std::norm(z);
    if (!(az2 < 1.0)) throw std::invalid_argument("b1star_ratio: grid point outside the disc");
    const double pref = (1.0 - az2) * (1.0 - az2);
    const double zarg = std::arg(z);
    const double zscale = std::max(1.0 - std::abs(z), 1e-6);

    double total = 0.0;
    std::vector<double> inc;
    for (int i = 0; i < radial_shells; ++i) {
      const double t_hi = std::pow(0.5, i);
      const double t_lo = (i == radial_shells - 1) ? 0.0 : 0.5 * t_hi;
      const double r_lo = 1.0 - t_hi, r_hi = 1.0 - std::max(t_lo, 1e-14);
      const double u_lo = r_lo * r_lo, u_hi = r_hi * r_hi;

      // cells refined around w's singular angles and the kernel direction
      std::vector<double> edges{-kTau / 2, kTau / 2};
      auto add_pack = [&](double ang, double core) {
        double d = std::remainder(ang - 0.0, kTau);
        for (double e = core; e < kTau; e *= 2.0) {
          if (d - e > -kTau / 2 && d - e < kTau / 2) edges.push_back(d - e);
          if (d + e > -kTau / 2 && d + e < kTau / 2) edges.push_back(d + e);
        }
        if (d > -kTau / 2 && d < kTau / 2) edges.push_back(d);
      };
      for (const auto& p : w.singular_points()) add_pack(p.angle, std::max(t_lo, 1e-12));
      for (double ang : w.smooth().concentration_angles) add_pack(ang, std::max(t_lo, 1e-12));
      add_pack(zarg, std::max(std::max(t_lo, 1e-12), zscale / 4.0));
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      const double max_width = kTau / angular_base;
      std::vector<double> cells;
      cells.push_back(edges.front());
      for (size_t c = 0; c + 1 < edges.size(); ++c) {
        const int pieces =
            std::max(1, static_cast<int>(std::ceil((edges[c + 1] - edges[c]) / max_width)));
        for (int p = 1; p <= pieces; ++p) {
          cells.push_back(edges[c] + (edges[c + 1] - edges[c]) * p / pieces);
        }
      }

      double shell = 0.0;
      for (size_t c = 0; c + 1 < cells.size(); ++c) {
        const double ca = cells[c], cb = cells[c + 1];
        const double width = cb - ca;
        for (int a2 = 0; a2 < 4; ++a2) {
          const double uu = u_lo + kGLx[a2] * (u_hi - u_lo);
          const double r = std::sqrt(uu);
          const double wu = kGLw[a2] * (u_hi - u_lo);
          for (int b = 0; b < 4; ++b) {
            const double th = ca + kGLx[b] * width;
            const complexd zeta(r * std::cos(th), r * std::sin(th));
            const double kern = pref / std::pow(std::norm(1.0 - std::conj(z) * zeta), 2.0);
            shell += wu * kGLw[b] * width / kTau * kern * w.eval(zeta);
          }
        }
      }
      inc.push_back(shell);
      total += shell;
      if (i > 8 && shell < 1e-8 * total) break;
    }
    const double ratio = total / w.eval(z);
    res.ratios.emplace_back(z, ratio);
    res.max_ratio = std::max(res.max_ratio, ratio);
  }
  return res;
}

std::vector<B2Report> conformal_sweep(const Weight& w, const std::vector<complexd>& z_grid,
                                      int max_level, const B2ScanOptions& opts) {
  std::vector<B2Report> out;
  out.reserve(z_grid.size());
  for (complexd z : z_grid) {
    out.push_back(b2_characteristic(w.pullback(DiskPoint(z)), Arc(0.0, 1.0), max_level, opts));
  }
  return out;
}

std::vector<VanishingProfilePoint> vanishing_b2_profile(const Weight& w,
                                                        const std::vector<double>& delta_grid,
                                                        int max_level,
                                                        const B2ScanOptions& opts) {
  for (size_t i = 1; i < delta_grid.size(); ++i) {
    if (delta_grid[i] >= delta_grid[i - 1]) {
      throw std::invalid_argument("vanishing_b2_profile: delta grid must decrease");
    }
  }
  const B2Report rep = b2_characteristic(w, Arc(0.0, 1.0), max_level, opts);
  std::vector<VanishingProfilePoint> out;
  for (double delta : delta_grid) {
    VanishingProfilePoint pt;
    pt.delta = delta;
    double v = 0.0;
    bool any = false;
    for (int L = 0; L <= max_level; ++L) {
      const double h = std::pow(0.5, L);
      const double A = h * (1.0 - (1.0 - h) * (1.0 - h));
      if (A < delta && static_cast<size_t>(L) < rep.per_level_sup.size()) {
        v = std::max(v, rep.per_level_sup[static_cast<size_t>(L)]);
        any = true;
      }
    }
    pt.status = rep.status;
    if (!any) {
      pt.status = QuadStatus::Inconclusive;
      pt.value = std::numeric_limits<double>::quiet_NaN();
    } else {
      pt.value = rep.status == QuadStatus::Divergent ? kInf : v;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace b2disc::weights
