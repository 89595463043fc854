#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "b2disc/bloch.hpp"
#include "b2disc/geometry.hpp"
#include "b2disc/weights.hpp"

namespace b2disc::operators {

// disc quadrature for P(f)(z) = int_D f(zeta)/(1 - conj(zeta) z)^2 dA(zeta)
struct DiscQuadrature {
  int radial_panels = 8;
  int radial_nodes = 8;
  int angular_nodes = 256;
  int refine = 0;  // doubles panels and angular nodes

  DiscQuadrature refined(int extra = 1) const;
  std::string describe() const;
};

std::vector<complexd> project(const std::function<complexd(complexd)>& f,
                              const std::vector<complexd>& z_grid,
                              const DiscQuadrature& quad = {});

// max over the zeta grid of |(P(f) o phi_z)(zeta) phi_z'(zeta) - P((f o phi_z) phi_z')(zeta)|
double conformal_identity_residual(const std::function<complexd(complexd)>& f,
                                   const DiskPoint& z, const std::vector<complexd>& zeta_grid,
                                   const DiscQuadrature& quad = {});

// Truncation of T_g f(z) = int_0^z f g' on the orthonormal monomial basis
// e_n = sqrt(n+1) z^n of the Bergman space; strictly lower triangular.
struct CesaroMatrix {
  int N = 0;
  std::vector<complexd> entries;  // row-major (k, n)

  complexd entry(int k, int n) const { return entries[static_cast<size_t>(k) * N + n]; }
  bool strictly_lower_triangular(double tol = 0.0) const;
};

CesaroMatrix cesaro_matrix(const bloch::AnalyticFunction& g, int N);

// coefficients of int_0^z f g' for a polynomial f (degree = coeffs.size()-1)
std::vector<complexd> volterra_apply_coeffs(const bloch::AnalyticFunction& g,
                                            const std::vector<complexd>& f_coeffs, int out_len);

struct TruncationTrace {
  double radius = 0.0;
  std::vector<std::pair<int, double>> trace;  // (N, radius of the N-truncation)
  std::string status;
};

// Spectral radius of the finite truncation. The matrix is strictly lower
// triangular in the monomial grading, so its eigenvalues are its diagonal:
// identically zero for every symbol and every N. Kept as the heuristic
// cross-check the B2 criterion is measured against.
double truncation_spectral_radius(const CesaroMatrix& M);
TruncationTrace truncation_radius_trace(const bloch::AnalyticFunction& g,
                                        const std::vector<int>& sizes);

struct SpectrumReport {
  std::string method;  // matrix-truncation | b2-criterion | eps-criterion
  double p = 2.0;
  double radius = 0.0;
  std::string status = "ok";
  std::vector<std::pair<double, bool>> bisection_trace;  // (lambda, all-xi pass)
  std::vector<std::pair<double, double>> eps_trace;      // (eps, C(eps) stability gap)
  int xi_count = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
};

// ||sigma_p(g)|| = inf { lambda > 0 : exp(p Re(g / (lambda xi))) in B2 for all xi }
SpectrumReport spectral_radius_b2(const bloch::AnalyticFunction& g, double p, int xi_count,
                                  double tol, int max_level = 8);

// smallest grid eps whose epsilon-condition constant is stable under budget
// doubling; 0 when every grid eps is stable
SpectrumReport spectral_radius_eps(const bloch::AnalyticFunction& g, long pair_budget,
                                   const std::vector<double>& eps_grid, std::uint64_t seed);

}  // namespace b2disc::operators
