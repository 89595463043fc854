#include "b2disc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "b2disc/sampling.hpp"

namespace b2disc::operators {

namespace {

// Gauss-Legendre nodes/weights on [0,1], order 8
constexpr double kGL8x[8] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                             0.40828267875217505, 0.5917173212478249,  0.7627662049581645,
                             0.8983332387068134,  0.9801449282487681};
constexpr double kGL8w[8] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                             0.18134189168918097, 0.18134189168918097, 0.15685332293894363,
                             0.11119051722668724, 0.05061426814518813};

struct DiscRule {
  std::vector<complexd> nodes;
  std::vector<double> weights;  // normalized area measure, sums to 1
};

DiscRule build_disc_rule(const DiscQuadrature& quad) {
  DiscRule rule;
  const int panels = quad.radial_panels << quad.refine;
  const int nt = quad.angular_nodes << quad.refine;
  rule.nodes.reserve(static_cast<size_t>(panels) * 8 * nt);
  rule.weights.reserve(rule.nodes.capacity());
  // GL panels in u = r^2 make the node weights exact for the area measure
  for (int p = 0; p < panels; ++p) {
    const double u_lo = static_cast<double>(p) / panels;
    const double u_hi = static_cast<double>(p + 1) / panels;
    for (int a = 0; a < 8; ++a) {
      const double u = u_lo + kGL8x[a] * (u_hi - u_lo);
      const double r = std::sqrt(u);
      const double wu = kGL8w[a] * (u_hi - u_lo);
      for (int b = 0; b < nt; ++b) {
        const double th = (b + 0.5) * kTau / nt;
        rule.nodes.emplace_back(r * std::cos(th), r * std::sin(th));
        rule.weights.push_back(wu / nt);
      }
    }
  }
  return rule;
}

}  // namespace

DiscQuadrature DiscQuadrature::refined(int extra) const {
  DiscQuadrature q = *this;
  q.refine += extra;
  return q;
}

std::string DiscQuadrature::describe() const {
  std::ostringstream os;
  os << "disc-gl:panels=" << (radial_panels << refine) << ",angular=" << (angular_nodes << refine);
  return os.str();
}

std::vector<complexd> project(const std::function<complexd(complexd)>& f,
                              const std::vector<complexd>& z_grid, const DiscQuadrature& quad) {
  const DiscRule rule = build_disc_rule(quad);
  std::vector<complexd> fvals(rule.nodes.size());
  for (size_t i = 0; i < rule.nodes.size(); ++i) fvals[i] = f(rule.nodes[i]);

  std::vector<complexd> out;
  out.reserve(z_grid.size());
  for (complexd z : z_grid) {
    complexd acc(0.0, 0.0);
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      const complexd d = 1.0 - std::conj(rule.nodes[i]) * z;
      acc += rule.weights[i] * fvals[i] / (d * d);
    }
    out.push_back(acc);
  }
  return out;
}

double conformal_identity_residual(const std::function<complexd(complexd)>& f,
                                   const DiskPoint& z, const std::vector<complexd>& zeta_grid,
                                   const DiscQuadrature& quad) {
  const MobiusMap phi{z};
  // left side: P(f) evaluated at phi_z(zeta), times phi_z'(zeta)
  std::vector<complexd> mapped;
  mapped.reserve(zeta_grid.size());
  for (complexd zeta : zeta_grid) mapped.push_back(phi.apply(zeta));
  const std::vector<complexd> lhs_raw = project(f, mapped, quad);

  // right side: P((f o phi_z) phi_z') at zeta
  const auto transformed = [&](complexd eta) { return f(phi.apply(eta)) * phi.derivative(eta); };
  const std::vector<complexd> rhs = project(transformed, zeta_grid, quad);

  double worst = 0.0;
  for (size_t i = 0; i < zeta_grid.size(); ++i) {
    const complexd lhs = lhs_raw[i] * phi.derivative(zeta_grid[i]);
    worst = std::max(worst, std::abs(lhs - rhs[i]));
  }
  return worst;
}

bool CesaroMatrix::strictly_lower_triangular(double tol) const {
  for (int k = 0; k < N; ++k) {
    for (int n = k; n < N; ++n) {
      if (std::abs(entry(k, n)) > tol) return false;
    }
  }
  return true;
}

CesaroMatrix cesaro_matrix(const bloch::AnalyticFunction& g, int N) {
  if (N < 1) throw std::invalid_argument("cesaro_matrix: N must be positive");
  CesaroMatrix M;
  M.N = N;
  M.entries.assign(static_cast<size_t>(N) * N, complexd(0.0, 0.0));
  // T_g e_n = sqrt(n+1) sum_m b_m z^{n+m+1}/(n+m+1) with g' = sum b_m z^m,
  // so <T_g e_n, e_k> = b_{k-n-1} sqrt(n+1) / (k sqrt(k+1)).
  for (int k = 1; k < N; ++k) {
    for (int n = 0; n < k; ++n) {
      const complexd b = g.deriv_coeff(k - n - 1);
      M.entries[static_cast<size_t>(k) * N + n] =
          b * std::sqrt(static_cast<double>(n + 1)) /
          (static_cast<double>(k) * std::sqrt(static_cast<double>(k + 1)));
    }
  }
  return M;
}

std::vector<complexd> volterra_apply_coeffs(const bloch::AnalyticFunction& g,
                                            const std::vector<complexd>& f_coeffs, int out_len) {
  // int_0^z f g': coefficient of z^k is (sum_{n+m=k-1} f_n b_m)/k
  std::vector<complexd> out(static_cast<size_t>(out_len), complexd(0.0, 0.0));
  for (int k = 1; k < out_len; ++k) {
    complexd acc(0.0, 0.0);
    for (int n = 0; n < static_cast<int>(f_coeffs.size()) && n <= k - 1; ++n) {
      acc += f_coeffs[static_cast<size_t>(n)] * g.deriv_coeff(k - 1 - n);
    }
    out[static_cast<size_t>(k)] = acc / static_cast<double>(k);
  }
  return out;
}

double truncation_spectral_radius(const CesaroMatrix& M) {
  // eigenvalues of a triangular matrix are its diagonal entries
  double r = 0.0;
  for (int k = 0; k < M.N; ++k) r = std::max(r, std::abs(M.entry(k, k)));
  return r;
}

TruncationTrace truncation_radius_trace(const bloch::AnalyticFunction& g,
                                        const std::vector<int>& sizes) {
  TruncationTrace out;
  for (int N : sizes) {
    if (N < 8) throw std::invalid_argument("truncation_radius_trace: N must be >= 8");
    const double r = truncation_spectral_radius(cesaro_matrix(g, N));
    out.trace.emplace_back(N, r);
    out.radius = r;
  }
  out.status = "exact (strictly lower triangular truncation)";
  return out;
}

namespace {

weights::Weight spectral_weight(const bloch::AnalyticFunction& g, double p, double lambda,
                                complexd xi) {
  // exp(p Re(g/(lambda xi))) = exp(Re(scale * g)) with scale = p conj(xi)/lambda
  return weights::Weight::exp_harmonic(g, std::conj(xi) * (p / lambda));
}

}  // namespace

SpectrumReport spectral_radius_b2(const bloch::AnalyticFunction& g, double p, int xi_count,
                                  double tol, int max_level) {
  if (!(p > 0.0)) throw std::invalid_argument("spectral_radius_b2: p must be positive");
  if (xi_count < 16) throw std::invalid_argument("spectral_radius_b2: xi_count must be >= 16");
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_radius_b2: tol must be positive");

  SpectrumReport rep;
  rep.method = "b2-criterion";
  rep.p = p;
  rep.xi_count = xi_count;
  rep.tol = tol;

  weights::B2ScanOptions so;
  so.max_level = max_level;

  const auto pass_all_xi = [&](double lambda) {
    for (int i = 0; i < xi_count; ++i) {
      const double th = kTau * i / xi_count;
      const complexd xi(std::cos(th), std::sin(th));
      const auto r =
          weights::b2_characteristic(spectral_weight(g, p, lambda, xi), max_level, so);
      if (!weights::b2_member(r)) {
        rep.bisection_trace.emplace_back(lambda, false);
        return false;
      }
    }
    rep.bisection_trace.emplace_back(lambda, true);
    return true;
  };

  if (pass_all_xi(tol)) {
    rep.radius = 0.0;  // every tested lambda passes; bounded-type symbol
    return rep;
  }
  double lo = tol, hi = std::max(1.0, 2.0 * tol);
  while (!pass_all_xi(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) {
      rep.status = "inconclusive: no passing lambda up to 1e6";
      rep.radius = hi;
      return rep;
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (pass_all_xi(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  rep.radius = hi;
  return rep;
}

SpectrumReport spectral_radius_eps(const bloch::AnalyticFunction& g, long pair_budget,
                                   const std::vector<double>& eps_grid, std::uint64_t seed) {
  if (pair_budget < 1000) {
    throw std::invalid_argument("spectral_radius_eps: pair_budget must be >= 1e3");
  }
  SpectrumReport rep;
  rep.method = "eps-criterion";
  rep.seed = seed;

  // |g(z)-g(zeta)| plays log w with w = exp(Re g) only for real parts; use
  // the modulus directly through two harmonic projections
  const weights::Weight w_re = weights::Weight::exp_harmonic(g, complexd(1.0, 0.0));
  const weights::Weight w_im = weights::Weight::exp_harmonic(g, complexd(0.0, -1.0));

  std::vector<double> sorted = eps_grid;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  double smallest_stable = -1.0;
  bool all_stable = true;
  for (double eps : sorted) {
    // C(eps) for the two projections at two budgets; the pair covers the
    // complex oscillation up to a factor sqrt(2)
    const double c1 = std::max(weights::epsilon_condition(w_re, eps, pair_budget, seed),
                               weights::epsilon_condition(w_im, eps, pair_budget, seed));
    const double c2 =
        std::max(weights::epsilon_condition(w_re, eps, 2 * pair_budget, seed),
                 weights::epsilon_condition(w_im, eps, 2 * pair_budget, seed));
    const double gap = std::abs(c2 - c1) / std::max(c1, 1e-12);
    rep.eps_trace.emplace_back(eps, gap);
    if (gap < 0.10) {
      smallest_stable = eps;
    } else {
      all_stable = false;
      break;  // grid is sorted downward; smaller eps only get worse
    }
  }
  rep.radius = all_stable ? 0.0 : std::max(smallest_stable, 0.0);
  if (smallest_stable < 0.0) rep.status = "no stable eps on the grid";
  return rep;
}

}  // namespace b2disc::operators
