#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "b2disc/geometry.hpp"
#include "b2disc/weights.hpp"

namespace b2disc::extension {

// Greedily built point set with pairwise hyperbolic separation >= s; the
// covering radius is verified on a probe grid up to the stated truncation
// radius. McShane extension needs a true metric, so the net lives on the
// Standard convention by default.
struct HyperbolicNet {
  std::vector<complexd> points;
  double separation = 1.0;
  double r_max = 0.99;
  double covering_radius = 0.0;  // measured on the probe grid
  bool covering_warning = false;  // probe covering radius > 2 s
  MetricConvention convention = MetricConvention::Standard;
};

HyperbolicNet build_net(double separation, double r_max, std::uint64_t seed,
                        MetricConvention conv = MetricConvention::Standard);

struct LipschitzViolation : std::runtime_error {
  std::size_t i, j;
  double ratio;
  LipschitzViolation(std::size_t i_, std::size_t j_, double ratio_)
      : std::runtime_error("net values violate the Lipschitz bound"), i(i_), j(j_), ratio(ratio_) {}
};

// v(z) = min_j (values_j + L beta(z, z_j)); interpolates the net values and
// is globally L-Lipschitz when the net values are admissible (validated).
class McShaneExtension {
 public:
  McShaneExtension(HyperbolicNet net, std::vector<double> values, double lipschitz_constant);

  double operator()(complexd z) const;
  double lipschitz_constant() const { return L_; }
  const HyperbolicNet& net() const { return net_; }
  const std::vector<double>& values() const { return values_; }

 private:
  HyperbolicNet net_;
  std::vector<double> values_;
  double L_;
};

struct Decomposition {
  HyperbolicNet net;
  std::vector<double> net_values;
  double lipschitz_L = 0.0;   // slope used by the extension (4 eps + eta)
  double eps = 0.0;
  double eta = 0.0;
  double c_eps = 0.0;         // measured epsilon_condition constant at slope 4 eps
  double u_sup = 0.0;         // empirical sup |f - v|
  double v_lip = 0.0;         // empirical HLip seminorm of v
  bool trivial = false;       // v == 0 (bounded f needs no Lipschitz part)
  long probes = 0;
  MetricConvention convention = MetricConvention::Standard;

  std::function<double(complexd)> v;
  std::function<double(complexd)> u;
};

struct DecomposeOptions {
  double r_max = 0.9999;
  long probe_budget = 20000;
  long pair_budget = 20000;
  std::uint64_t seed = 1;
  int max_level = 10;
  MetricConvention convention = MetricConvention::Standard;
};

// log w = u + v with v hyperbolically Lipschitz of slope <= 4 eps + eta and
// u bounded; requires w^{1/eps} in B2 (checked through the scan predicate).
Decomposition decompose(const weights::Weight& w, double eps, double eta, double gamma_cert,
                        const DecomposeOptions& opts = {});

struct SandwichResult {
  double gamma_value = 0.0;
  double dist_upper = 0.0;
  double dist_lower = 0.0;
  bool ok = false;
  std::string status;  // "ok" or the reason the check is inconclusive
  Decomposition decomposition;
};

SandwichResult theorem1_sandwich(const weights::Weight& w, double tol,
                                 const DecomposeOptions& opts = {});

struct SNormResult {
  double value = 0.0;
  double best_eps = 0.0;
  std::vector<std::pair<double, double>> trace;  // (eps, u_sup + v_lip)
};

// min over the eps grid of u_sup + v_lip, plus the trivial candidate
// (u = f, v = 0); an upper bound for the decomposition norm of f.
SNormResult s_norm_upper(const weights::Weight& w, const std::vector<double>& eps_grid,
                         const DecomposeOptions& opts = {});

}  // namespace b2disc::extension
