#include "b2disc/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "b2disc/carleson.hpp"
#include "b2disc/sampling.hpp"

namespace b2disc::bloch {

namespace {

// z^n for potentially huge n, via exp(n log z); exact 0 at z = 0.
inline complexd pow_int(complexd z, std::int64_t n) {
  if (n == 0) return complexd(1.0, 0.0);
  if (z == complexd(0.0, 0.0)) return complexd(0.0, 0.0);
  const double lr = std::log(std::abs(z));
  const double th = std::arg(z);
  const double mag = std::exp(static_cast<double>(n) * lr);
  const double ang = static_cast<double>(n) * th;
  return complexd(mag * std::cos(ang), mag * std::sin(ang));
}

constexpr double kTermFloor = 1e-17;

}  // namespace

AnalyticFunction AnalyticFunction::power_series(std::vector<complexd> coeffs) {
  AnalyticFunction g;
  g.kind_ = Kind::PowerSeries;
  g.a_ = std::move(coeffs);
  return g;
}

AnalyticFunction AnalyticFunction::lacunary(std::vector<complexd> a,
                                            std::vector<std::int64_t> n) {
  if (a.size() != n.size() || a.empty()) {
    throw std::invalid_argument("lacunary: coefficient and exponent lists must match");
  }
  for (size_t k = 0; k < n.size(); ++k) {
    if (n[k] < 1 || (k > 0 && n[k] <= n[k - 1])) {
      throw std::invalid_argument("lacunary: exponents must be strictly increasing, >= 1");
    }
  }
  AnalyticFunction g;
  g.kind_ = Kind::Lacunary;
  g.a_ = std::move(a);
  g.n_ = std::move(n);
  return g;
}

AnalyticFunction AnalyticFunction::log_one_minus(complexd xi0) {
  const double m = std::abs(xi0);
  if (std::abs(m - 1.0) > 1e-12) {
    throw std::invalid_argument("log_one_minus: xi0 must lie on the unit circle");
  }
  AnalyticFunction g;
  g.kind_ = Kind::LogOneMinus;
  g.xi0_ = xi0 / m;
  return g;
}

AnalyticFunction AnalyticFunction::monomial() {
  return power_series({complexd(0.0, 0.0), complexd(1.0, 0.0)});
}

complexd AnalyticFunction::eval(complexd z) const {
  switch (kind_) {
    case Kind::PowerSeries: {
      // Horner
      complexd acc(0.0, 0.0);
      for (auto it = a_.rbegin(); it != a_.rend(); ++it) acc = acc * z + *it;
      return scale_ * acc;
    }
    case Kind::Lacunary: {
      complexd acc(0.0, 0.0);
      const double az = std::abs(z);
      for (size_t k = 0; k < a_.size(); ++k) {
        const double amag = std::abs(a_[k]);
        if (az < 1.0 && amag * std::exp(static_cast<double>(n_[k]) * std::log(std::max(az, 1e-300))) < kTermFloor) {
          if (az < 0.5) break;  // exponents increase, terms only shrink
          continue;
        }
        acc += a_[k] * pow_int(z, n_[k]);
      }
      return scale_ * acc;
    }
    case Kind::LogOneMinus:
      return -scale_ * std::log(1.0 - std::conj(xi0_) * z);
  }
  return {};
}

complexd AnalyticFunction::deriv(complexd z) const {
  switch (kind_) {
    case Kind::PowerSeries: {
      complexd acc(0.0, 0.0);
      for (size_t k = a_.size(); k-- > 1;) {
        acc = acc * z + static_cast<double>(k) * a_[k];
      }
      return scale_ * acc;
    }
    case Kind::Lacunary: {
      complexd acc(0.0, 0.0);
      const double az = std::abs(z);
      for (size_t k = 0; k < a_.size(); ++k) {
        const double nk = static_cast<double>(n_[k]);
        const double amag = std::abs(a_[k]) * nk;
        if (az < 1.0 && amag * std::exp((nk - 1.0) * std::log(std::max(az, 1e-300))) < kTermFloor) {
          if (az < 0.5) break;
          continue;
        }
        acc += a_[k] * nk * pow_int(z, n_[k] - 1);
      }
      return scale_ * acc;
    }
    case Kind::LogOneMinus: {
      const complexd c = std::conj(xi0_);
      return scale_ * c / (1.0 - c * z);
    }
  }
  return {};
}

complexd AnalyticFunction::deriv_coeff(std::int64_t m) const {
  switch (kind_) {
    case Kind::PowerSeries: {
      const std::int64_t idx = m + 1;
      if (idx < 1 || idx >= static_cast<std::int64_t>(a_.size())) return complexd(0.0, 0.0);
      return scale_ * static_cast<double>(idx) * a_[static_cast<size_t>(idx)];
    }
    case Kind::Lacunary: {
      for (size_t k = 0; k < n_.size(); ++k) {
        if (n_[k] - 1 == m) return scale_ * a_[k] * static_cast<double>(n_[k]);
        if (n_[k] - 1 > m) break;
      }
      return complexd(0.0, 0.0);
    }
    case Kind::LogOneMinus:
      if (m < 0) return complexd(0.0, 0.0);
      return scale_ * pow_int(std::conj(xi0_), m + 1);
  }
  return {};
}

AnalyticFunction AnalyticFunction::scaled(complexd c) const {
  AnalyticFunction g = *this;
  g.scale_ *= c;
  return g;
}

std::string AnalyticFunction::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::PowerSeries:
      os << "ps[";
      for (const auto& c : a_) os << c.real() << "," << c.imag() << ";";
      os << "]";
      break;
    case Kind::Lacunary:
      os << "lac[";
      for (size_t k = 0; k < a_.size(); ++k) {
        os << n_[k] << ":" << a_[k].real() << "," << a_[k].imag() << ";";
      }
      os << "]";
      break;
    case Kind::LogOneMinus:
      os << "log1m[" << xi0_.real() << "," << xi0_.imag() << "]";
      break;
  }
  os << "*(" << scale_.real() << "," << scale_.imag() << ")";
  return os.str();
}

namespace {

// largest exponent with non-negligible weight at boundary depth t
std::int64_t active_bandwidth(const AnalyticFunction& g, double t) {
  std::int64_t best = 1;
  if (g.kind() == AnalyticFunction::Kind::PowerSeries) {
    return static_cast<std::int64_t>(g.coefficients().empty() ? 1 : g.coefficients().size());
  }
  if (g.kind() == AnalyticFunction::Kind::LogOneMinus) {
    return static_cast<std::int64_t>(std::min(1e12, 16.0 / std::max(t, 1e-12)));
  }
  for (size_t k = 0; k < g.exponents().size(); ++k) {
    const double nk = static_cast<double>(g.exponents()[k]);
    if (std::abs(g.coefficients()[k]) * nk * std::exp(-nk * t) > 1e-9) {
      best = std::max(best, g.exponents()[k]);
    }
  }
  return best;
}

}  // namespace

SeminormResult bloch_seminorm(const AnalyticFunction& g, const SeminormGrid& grid) {
  SeminormResult res;
  const int depth_steps = grid.max_depth * grid.radii_per_octave;
  for (int i = 0; i <= depth_steps; ++i) {
    const double t = std::pow(2.0, -static_cast<double>(i) / grid.radii_per_octave);
    const double r = 1.0 - 0.5 * t;  // radii sweep 1/2 .. 1-2^{-max_depth-1}
    if (r <= 0.0) continue;
    const std::int64_t bw = active_bandwidth(g, 1.0 - r);
    const int nt = static_cast<int>(std::clamp<std::int64_t>(4 * bw, grid.angular_base,
                                                             grid.angular_cap));
    const double w = 1.0 - r * r;
    for (int b = 0; b < nt; ++b) {
      const double th = kTau * b / nt;
      const complexd z(r * std::cos(th), r * std::sin(th));
      const double v = w * std::abs(g.deriv(z));
      if (v > res.value) {
        res.value = v;
        res.argmax = z;
      }
    }
  }
  // centre of the disc
  const double v0 = std::abs(g.deriv(complexd(0.0, 0.0)));
  if (v0 > res.value) {
    res.value = v0;
    res.argmax = complexd(0.0, 0.0);
  }
  return res;
}

std::vector<std::pair<double, double>> little_bloch_profile(const AnalyticFunction& g,
                                                            const std::vector<double>& radii,
                                                            int angular_base, int angular_cap) {
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("little_bloch_profile: bad radius");
    const std::int64_t bw = active_bandwidth(g, 1.0 - r);
    const int nt = static_cast<int>(std::clamp<std::int64_t>(4 * bw, angular_base, angular_cap));
    double sup = 0.0;
    for (int b = 0; b < nt; ++b) {
      const double th = kTau * b / nt;
      const complexd z(r * std::cos(th), r * std::sin(th));
      sup = std::max(sup, (1.0 - r * r) * std::abs(g.deriv(z)));
    }
    out.emplace_back(r, sup);
  }
  return out;
}

std::pair<double, double> AnnulusFamily::depth_range(int k) const {
  if (k < 1 || k > static_cast<int>(n.size())) throw std::invalid_argument("annulus index");
  const double nk = static_cast<double>(n[static_cast<size_t>(k - 1)]);
  return {1.0 / (M * nk), M / nk};
}

bool AnnulusFamily::contains(int k, complexd z) const {
  auto [lo, hi] = depth_range(k);
  const double t = 1.0 - std::abs(z);
  return t >= lo && t <= hi;
}

bool AnnulusFamily::in_union(complexd z) const {
  const double t = 1.0 - std::abs(z);
  for (int k = 1; k <= static_cast<int>(n.size()); ++k) {
    auto [lo, hi] = depth_range(k);
    if (t >= lo && t <= hi) return true;
  }
  return false;
}

bool AnnulusFamily::pairwise_disjoint_from(int k0) const {
  for (int k = k0; k < static_cast<int>(n.size()); ++k) {
    const double ratio = static_cast<double>(n[static_cast<size_t>(k)]) /
                         static_cast<double>(n[static_cast<size_t>(k - 1)]);
    if (ratio <= M * M) return false;
  }
  return true;
}

void require_super_lacunary(const std::vector<std::int64_t>& n) {
  if (n.size() < 4) throw std::invalid_argument("super-lacunary check needs >= 4 terms");
  double first = static_cast<double>(n[1]) / static_cast<double>(n[0]);
  double prev = first;
  for (size_t k = 1; k + 1 < n.size(); ++k) {
    const double r = static_cast<double>(n[k + 1]) / static_cast<double>(n[k]);
    if (r < prev - 1e-12) {
      throw std::invalid_argument("sequence ratios decrease: not super-lacunary");
    }
    prev = r;
  }
  if (prev < 2.0 * first) {
    throw std::invalid_argument(
        "sequence has (near-)constant ratio; n_{k+1}/n_k must tend to infinity");
  }
}

Counterexample build_counterexample(LacunarySpec spec, int terms) {
  if (terms < 4 || terms > 25) {
    throw std::invalid_argument("build_counterexample: terms must lie in [4, 25]");
  }
  std::vector<std::int64_t> n;
  n.reserve(static_cast<size_t>(terms));
  if (spec == LacunarySpec::Factorial) {
    std::int64_t f = 1;
    for (int k = 1; k <= terms; ++k) {
      f *= k;
      n.push_back(f);
    }
  } else {
    // seeded 1, 2 then n_{k+1} = k n_k; ratios 2, 2, 3, 4, ...
    n.push_back(1);
    n.push_back(2);
    for (int k = 2; static_cast<int>(n.size()) < terms; ++k) {
      n.push_back(n.back() * k);
    }
  }
  require_super_lacunary(n);
  std::vector<complexd> a(n.size(), complexd(1.0, 0.0));
  return Counterexample{AnalyticFunction::lacunary(a, n), n, spec, terms};
}

AnnulusFloor annulus_floor(const Counterexample& ce, int j, int samples, std::uint64_t seed,
                           double M) {
  if (j < 1 || j > ce.terms) throw std::invalid_argument("annulus_floor: j out of built range");
  if (samples < 1) throw std::invalid_argument("annulus_floor: need samples >= 1");
  const double nj = static_cast<double>(ce.n[static_cast<size_t>(j - 1)]);
  const double t_lo = 1.0 / (M * nj), t_hi = M / nj;

  std::mt19937_64 rng(seed);
  double floor = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const complexd z = sample_annulus(rng, 1.0 - t_hi, 1.0 - t_lo);
    const double v = (1.0 - std::norm(z)) * std::abs(z) * std::abs(ce.g.deriv(z));
    floor = std::min(floor, v);
  }

  AnnulusFloor out;
  out.floor = floor;
  double c1 = 0.0;
  for (int k = 1; k < j; ++k) c1 += static_cast<double>(ce.n[static_cast<size_t>(k - 1)]);
  out.correction_lower = 4.0 * c1 / nj;
  double c2 = 0.0;
  for (int k = j + 1; k <= ce.terms; ++k) {
    const double nk = static_cast<double>(ce.n[static_cast<size_t>(k - 1)]);
    c2 += nk * std::exp(nk * std::log1p(-1.0 / (2.0 * nj)));
  }
  out.correction_upper = 4.0 * c2 / nj;
  out.main_term = 0.5 * std::abs(ce.g.coefficients()[static_cast<size_t>(j - 1)]) *
                  std::exp(nj * std::log1p(-2.0 / nj));
  return out;
}

OffAnnuliSup off_annuli_sup(const AnalyticFunction& g, const std::vector<std::int64_t>& n,
                            double M, int depth_nodes, int angular_nodes, double t_min) {
  if (!(M > 1.0)) throw std::invalid_argument("off_annuli_sup: M must exceed 1");
  AnnulusFamily fam{M, n};
  if (t_min <= 0.0) {
    t_min = 1.0 / (4.0 * M * static_cast<double>(n.back()));
  }
  OffAnnuliSup out;
  bool any_outside = false;
  const double t_max = 0.9;
  for (int i = 0; i < depth_nodes; ++i) {
    const double t = t_max * std::pow(t_min / t_max, static_cast<double>(i) / (depth_nodes - 1));
    const double r = 1.0 - t;
    bool inside = false;
    for (int k = 1; k <= static_cast<int>(n.size()); ++k) {
      auto [lo, hi] = fam.depth_range(k);
      if (t >= lo && t <= hi) { inside = true; break; }
    }
    if (inside) continue;
    any_outside = true;
    const std::int64_t bw = active_bandwidth(g, t);
    const int nt = static_cast<int>(std::clamp<std::int64_t>(4 * bw, angular_nodes, 1 << 14));
    for (int b = 0; b < nt; ++b) {
      const double th = kTau * b / nt;
      const complexd z(r * std::cos(th), r * std::sin(th));
      const double v = (1.0 - r * r) * std::abs(g.deriv(z));
      if (v > out.value) {
        out.value = v;
        out.argmax = z;
      }
    }
  }
  out.coverage_warning = !any_outside;
  return out;
}

bool level_set_member(const AnalyticFunction& g, double eps, complexd z) {
  return (1.0 - std::norm(z)) * std::abs(g.deriv(z)) > eps;
}

double area_function_truncated(const AnalyticFunction& g, double eps, complexd xi, double delta,
                               double aperture, const AreaFunctionQuad& quad) {
  if (!(delta > 0.0 && delta < 0.25)) {
    throw std::invalid_argument("area_function_truncated: delta must lie in (0, 1/4)");
  }
  StolzAngle stolz(xi, aperture);
  const double vx = std::arg(stolz.vertex);

  // radial break depths: octaves of delta plus any caller-provided edges
  std::vector<double> breaks;
  for (double t = delta; t < 0.5; t *= 2.0) breaks.push_back(t);
  breaks.push_back(0.5);
  for (double b : quad.shell_breaks) {
    if (b > delta && b < 0.5) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double total = 0.0;
  for (size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double t_lo = breaks[s], t_hi = breaks[s + 1];
    const int nr = std::max(2, static_cast<int>(quad.radial_per_octave *
                                                std::log2(t_hi / t_lo)));
    for (int i = 0; i < nr; ++i) {
      const double t = t_lo * std::pow(t_hi / t_lo, (i + 0.5) / nr);
      const double dt = t * (std::pow(t_hi / t_lo, 1.0 / nr) - std::pow(t_hi / t_lo, -0.0)) /
                        1.0;  // log-spaced cell width
      const double cell_dt = t * std::log(t_hi / t_lo) / nr;  // dt for log spacing
      (void)dt;
      const double r = 1.0 - t;
      // Stolz angle at depth t spans |theta - vx| < ~sqrt(sigma^2-1) t; pad it
      const double half = std::min(kTau / 2, 2.0 * aperture * t);
      const int nt = quad.angular_nodes;
      const double dth = 2.0 * half / nt;
      for (int b = 0; b < nt; ++b) {
        const double th = vx - half + (b + 0.5) * dth;
        const complexd z(r * std::cos(th), r * std::sin(th));
        if (!stolz.contains(z)) continue;
        if (!level_set_member(g, eps, z)) continue;
        const double om = 1.0 - r * r;
        // normalized area element (1/pi) r dr dtheta
        total += (r * cell_dt * dth / 3.14159265358979323846) / (om * om);
      }
    }
  }
  return std::sqrt(total);
}

CauchyOscResult cauchyosc_ratio(const AnalyticFunction& f, const std::vector<complexd>& z_grid,
                                int radial_nodes, int angular_nodes) {
  CauchyOscResult out;
  for (complexd z : z_grid) {
    const double az = std::abs(z);
    if (!(az > 0.75 && az < 1.0)) {
      throw std::invalid_argument("cauchyosc_ratio: grid points must satisfy 3/4 < |z| < 1");
    }
    const double t = 1.0 - az;
    // smallest square containing the disc { |zeta - z| < 1 - |z| }
    const double m = std::min(1.0, 2.2 * t);
    carleson::CarlesonSquare Q{carleson::Arc(std::arg(z), m)};

    // polar tensor quadrature of Re f over Q
    const double r_lo = 1.0 - m;
    double mean = 0.0, weight = 0.0;
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(radial_nodes) * angular_nodes);
    std::vector<double> wts;
    wts.reserve(vals.capacity());
    for (int i = 0; i < radial_nodes; ++i) {
      const double r2 = r_lo * r_lo + (i + 0.5) / radial_nodes * (1.0 - r_lo * r_lo);
      const double r = std::sqrt(r2);
      for (int b = 0; b < angular_nodes; ++b) {
        const double th = Q.arc.center_angle + ((b + 0.5) / angular_nodes - 0.5) * m * kTau;
        const double v = f.eval(complexd(r * std::cos(th), r * std::sin(th))).real();
        vals.push_back(v);
        wts.push_back(1.0);
        mean += v;
        weight += 1.0;
      }
    }
    mean /= weight;
    double osc2 = 0.0;
    for (size_t i = 0; i < vals.size(); ++i) osc2 += (vals[i] - mean) * (vals[i] - mean);
    osc2 /= weight;

    const double lhs = (1.0 - az * az) * (1.0 - az * az) * std::norm(f.deriv(z));
    if (osc2 < 1e-28 * (1.0 + std::abs(mean))) {
      out.skipped += 1;
      continue;
    }
    const double ratio = lhs / osc2;
    out.ratios.emplace_back(z, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

}  // namespace b2disc::bloch
