// Batch driver: every computation is a subcommand that writes a JSON report
// (and optionally a CSV grid) with the fully resolved configuration embedded.
// Exit codes: 0 success, 1 invalid input, 2 mathematically divergent or
// inconclusive result.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "b2disc/report.hpp"
#include "b2disc/sampling.hpp"

using namespace b2disc;
using json = report::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitFlagged = 2;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<complexd> parse_points(const std::string& s) {
  // "re,im;re,im;..."
  std::vector<complexd> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto comma = item.find(',');
    if (comma == std::string::npos) {
      out.emplace_back(std::stod(item), 0.0);
    } else {
      out.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
    }
  }
  return out;
}

bloch::AnalyticFunction parse_function(const std::string& spec) {
  if (spec == "z") return bloch::AnalyticFunction::monomial();
  if (spec.rfind("poly:", 0) == 0) {
    std::vector<complexd> coeffs;
    for (double c : parse_list(spec.substr(5))) coeffs.emplace_back(c, 0.0);
    return bloch::AnalyticFunction::power_series(coeffs);
  }
  if (spec.rfind("log1z", 0) == 0) {
    double theta = 0.0;
    if (spec.size() > 5 && spec[5] == ':') theta = std::stod(spec.substr(6));
    return bloch::AnalyticFunction::log_one_minus(complexd(std::cos(theta), std::sin(theta)));
  }
  if (spec.rfind("lacunary:", 0) == 0) {
    const std::string rest = spec.substr(9);
    const auto colon = rest.find(':');
    const std::string family = colon == std::string::npos ? rest : rest.substr(0, colon);
    const int terms = colon == std::string::npos ? 10 : std::stoi(rest.substr(colon + 1));
    if (family == "factorial") {
      return bloch::build_counterexample(bloch::LacunarySpec::Factorial, terms).g;
    }
    if (family == "super") {
      return bloch::build_counterexample(bloch::LacunarySpec::SuperLacunary, terms).g;
    }
    if (family == "littlebloch") {
      std::vector<complexd> a;
      std::vector<std::int64_t> n;
      for (int k = 1; k <= terms; ++k) {
        a.emplace_back(1.0 / k, 0.0);
        n.push_back(std::int64_t(1) << k);
      }
      return bloch::AnalyticFunction::lacunary(a, n);
    }
    throw CLI::ValidationError("--g", "unknown lacunary family '" + family + "'");
  }
  throw CLI::ValidationError("--g", "unknown function spec '" + spec + "'");
}

weights::Weight parse_weight(const std::string& spec) {
  if (spec == "one") return weights::Weight::one();
  if (spec.rfind("radial-log:", 0) == 0) {
    return weights::Weight::radial_power(std::stod(spec.substr(11)));
  }
  if (spec.rfind("radial:", 0) == 0) {
    return weights::Weight::radial_power(std::stod(spec.substr(7)));
  }
  if (spec.rfind("point:", 0) == 0 || spec.rfind("point-log:", 0) == 0) {
    const std::string rest = spec.substr(spec.find(':') + 1);
    const auto colon = rest.find(':');
    const double s = std::stod(colon == std::string::npos ? rest : rest.substr(0, colon));
    const double theta = colon == std::string::npos ? 0.0 : std::stod(rest.substr(colon + 1));
    return weights::Weight::point_power(s, complexd(std::cos(theta), std::sin(theta)));
  }
  if (spec.rfind("exp-re:", 0) == 0) {
    return weights::Weight::exp_harmonic(parse_function(spec.substr(7)), complexd(1.0, 0.0));
  }
  if (spec.rfind("exp-harmonic:", 0) == 0) {
    // exp-harmonic:GSPEC:re,im
    const std::string rest = spec.substr(13);
    const auto last = rest.rfind(':');
    if (last == std::string::npos) {
      return weights::Weight::exp_harmonic(parse_function(rest), complexd(1.0, 0.0));
    }
    const auto scale = parse_points(rest.substr(last + 1));
    return weights::Weight::exp_harmonic(parse_function(rest.substr(0, last)),
                                         scale.empty() ? complexd(1.0, 0.0) : scale[0]);
  }
  if (spec.rfind("grid:", 0) == 0) {
    return weights::Weight::grid_sampled(weights::GridData::load(spec.substr(5)));
  }
  throw CLI::ValidationError("--weight", "unknown weight spec '" + spec + "'");
}

MetricConvention parse_metric(const std::string& s) {
  if (s == "paper-squared" || s == "paper") return MetricConvention::PaperSquared;
  if (s == "standard") return MetricConvention::Standard;
  throw CLI::ValidationError("--metric", "must be 'paper-squared' or 'standard'");
}

struct Output {
  std::string out_path;
  std::string csv_path;
  bool timestamp = true;

  int emit(const std::string& kind, json config, json result, int exit_code) const {
    json env = report::envelope(kind, std::move(config), std::move(result), timestamp);
    if (out_path.empty() || out_path == "-") {
      std::cout << env.dump(2) << "\n";
    } else {
      std::ofstream f(out_path);
      if (!f) throw std::runtime_error("cannot open output file " + out_path);
      f << env.dump(2) << "\n";
    }
    return exit_code;
  }
};

// pre-pass: expand --config FILE into --key=value arguments placed before the
// explicit command line, so explicit values win (options take the last value)
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file " + config_path);
  json j;
  in >> j;
  if (!j.is_object()) throw std::runtime_error("config file must hold a JSON object");
  std::vector<std::string> expanded;
  if (!args.empty()) expanded.push_back(args[0]);  // subcommand first
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string v;
    if (it.value().is_string()) {
      v = it.value().get<std::string>();
    } else {
      v = it.value().dump();
    }
    expanded.push_back("--" + it.key() + "=" + v);
  }
  for (size_t i = args.empty() ? 0 : 1; i < args.size(); ++i) expanded.push_back(args[i]);
  return expanded;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bekolle-Bonami weights, Bloch functions and Cesaro spectra on the unit disc"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  std::string weight_spec = "one", g_spec = "z", f_spec = "abs2", metric = "paper-squared";
  std::string out_path, csv_path, cache_path, config_path;
  bool no_timestamp = false;
  int max_level = 10, jobs = 0;
  std::uint64_t seed = 1;
  long pairs = 20000, samples = 100000;
  double tol = 0.01, eps = 1.0, eta = 0.1;

  if (const char* env = std::getenv("B2DISC_JOBS")) jobs = std::atoi(env);
  (void)jobs;  // scans are shared-pass; the flag is accepted for compatibility

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "output JSON path ('-' for stdout)");
    sub->add_option("--csv", csv_path, "optional CSV grid path");
    sub->add_option("--config", config_path, "JSON config file with option defaults");
    sub->add_option("--jobs", jobs, "worker count (reserved)");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the generated_at field");
  };

  auto* c_b2 = app.add_subcommand("b2-char", "B2 characteristic of a weight");
  c_b2->add_option("--weight", weight_spec)->required();
  c_b2->add_option("--max-level", max_level);
  c_b2->add_option("--cache", cache_path, "quadrature cache JSON");
  add_common(c_b2);

  auto* c_gamma = app.add_subcommand("gamma", "gamma(log w) = inf{t : w^(1/t) in B2}");
  c_gamma->add_option("--weight", weight_spec)->required();
  c_gamma->add_option("--tol", tol);
  c_gamma->add_option("--max-level", max_level);
  add_common(c_gamma);

  auto* c_osc = app.add_subcommand("osc-const", "hyperbolic oscillation constant");
  c_osc->add_option("--weight", weight_spec)->required();
  c_osc->add_option("--pairs", pairs);
  c_osc->add_option("--seed", seed);
  c_osc->add_option("--metric", metric);
  add_common(c_osc);

  double arc_center = 0.0, arc_length = 1.0, lam_min = 0.5, lam_max = 6.0;
  int lam_count = 12;
  auto* c_jn = app.add_subcommand("jn-profile", "John-Nirenberg tail profile on a square");
  c_jn->add_option("--weight", weight_spec)->required();
  c_jn->add_option("--arc-center", arc_center);
  c_jn->add_option("--arc-length", arc_length);
  c_jn->add_option("--lambda-min", lam_min);
  c_jn->add_option("--lambda-max", lam_max);
  c_jn->add_option("--lambda-count", lam_count);
  c_jn->add_option("--samples", samples);
  c_jn->add_option("--seed", seed);
  add_common(c_jn);

  int discs = 400, per_disc = 2000;
  auto* c_bmo = app.add_subcommand("bmo-norm", "sampled BMO(D) norm of log w");
  c_bmo->add_option("--weight", weight_spec)->required();
  c_bmo->add_option("--discs", discs);
  c_bmo->add_option("--samples-per-disc", per_disc);
  c_bmo->add_option("--seed", seed);
  add_common(c_bmo);

  auto* c_eps = app.add_subcommand("eps-cond", "C(eps) for the oscillation condition");
  c_eps->add_option("--weight", weight_spec)->required();
  c_eps->add_option("--eps", eps)->required();
  c_eps->add_option("--pairs", pairs);
  c_eps->add_option("--seed", seed);
  c_eps->add_option("--metric", metric);
  add_common(c_eps);

  std::string sar_weights, sar_masses;
  int sar_random = 0, sar_size = 8;
  auto* c_sar = app.add_subcommand("sarason", "finite-space Sarason variance bound");
  c_sar->add_option("--weights", sar_weights, "comma-separated weight values");
  c_sar->add_option("--masses", sar_masses, "comma-separated masses");
  c_sar->add_option("--random", sar_random, "check this many random admissible spaces");
  c_sar->add_option("--size-max", sar_size);
  c_sar->add_option("--seed", seed);
  add_common(c_sar);

  int z_count = 8;
  double z_max = 0.9;
  auto* c_b1 = app.add_subcommand("b1star", "sup_z int (w o phi_z) dA / w(z)");
  c_b1->add_option("--weight", weight_spec)->required();
  c_b1->add_option("--z-count", z_count);
  c_b1->add_option("--z-max", z_max);
  add_common(c_b1);

  auto* c_sweep = app.add_subcommand("conf-sweep", "B2 characteristics of Mobius pullbacks");
  c_sweep->add_option("--weight", weight_spec)->required();
  c_sweep->add_option("--z-count", z_count);
  c_sweep->add_option("--z-max", z_max);
  c_sweep->add_option("--max-level", max_level);
  add_common(c_sweep);

  int levels_min = 2;
  auto* c_van = app.add_subcommand("vanishing-profile", "sup over small squares of the product");
  c_van->add_option("--weight", weight_spec)->required();
  c_van->add_option("--max-level", max_level);
  c_van->add_option("--level-min", levels_min);
  add_common(c_van);

  int depth = 20;
  auto* c_bloch = app.add_subcommand("bloch-norm", "grid lower bound for the Bloch seminorm");
  c_bloch->add_option("--g", g_spec)->required();
  c_bloch->add_option("--depth", depth);
  add_common(c_bloch);

  std::string ce_spec = "factorial";
  int ce_terms = 10;
  auto* c_ce = app.add_subcommand("counterexample", "lacunary counterexample diagnostics");
  c_ce->add_option("--spec", ce_spec, "factorial | super");
  c_ce->add_option("--terms", ce_terms);
  c_ce->add_option("--samples", samples);
  c_ce->add_option("--pairs", pairs);
  c_ce->add_option("--seed", seed);
  add_common(c_ce);

  double af_eps = 0.05, af_delta = 0.01, xi_theta = 0.0;
  int halvings = 6;
  auto* c_area = app.add_subcommand("area-function", "truncated area function over a Stolz angle");
  c_area->add_option("--g", g_spec)->required();
  c_area->add_option("--eps", af_eps);
  c_area->add_option("--xi", xi_theta, "boundary vertex angle");
  c_area->add_option("--delta", af_delta, "initial truncation depth");
  c_area->add_option("--halvings", halvings);
  add_common(c_area);

  double separation = 1.0, r_max = 0.99;
  auto* c_net = app.add_subcommand("net", "greedy hyperbolic net");
  c_net->add_option("--separation", separation)->required();
  c_net->add_option("--r-max", r_max);
  c_net->add_option("--seed", seed);
  c_net->add_option("--metric", metric);
  add_common(c_net);

  auto* c_dec = app.add_subcommand("decompose", "log w = u + v with v hyperbolically Lipschitz");
  c_dec->add_option("--weight", weight_spec)->required();
  c_dec->add_option("--eps", eps, "target slope parameter (must exceed gamma)");
  c_dec->add_option("--eta", eta, "slack, as a fraction of eps");
  c_dec->add_option("--r-max", r_max);
  c_dec->add_option("--seed", seed);
  c_dec->add_option("--max-level", max_level);
  add_common(c_dec);

  auto* c_sand = app.add_subcommand("sandwich", "two-sided distance bounds against gamma");
  c_sand->add_option("--weight", weight_spec)->required();
  c_sand->add_option("--tol", tol);
  c_sand->add_option("--r-max", r_max);
  c_sand->add_option("--seed", seed);
  c_sand->add_option("--max-level", max_level);
  add_common(c_sand);

  std::string eps_grid_spec = "";
  auto* c_snorm = app.add_subcommand("s-norm", "upper bound for inf(|u|_inf + |v|_HLip)");
  c_snorm->add_option("--weight", weight_spec)->required();
  c_snorm->add_option("--eps-grid", eps_grid_spec, "comma-separated eps values");
  c_snorm->add_option("--r-max", r_max);
  c_snorm->add_option("--seed", seed);
  add_common(c_snorm);

  std::string z_list = "0.0,0.0;0.3,0.0;0.0,0.4";
  int panels = 8, angular = 256;
  auto* c_proj = app.add_subcommand("project", "Bergman projection values");
  c_proj->add_option("--f", f_spec, "abs2 | conj | poly:c0,c1,... | other function spec");
  c_proj->add_option("--z-list", z_list);
  c_proj->add_option("--panels", panels);
  c_proj->add_option("--angular", angular);
  add_common(c_proj);

  std::string z_point = "0.5,0.0";
  int zeta_count = 24;
  auto* c_res = app.add_subcommand("confid-residual", "conformal-invariance identity residual");
  c_res->add_option("--f", f_spec);
  c_res->add_option("--z", z_point);
  c_res->add_option("--zeta-count", zeta_count);
  c_res->add_option("--panels", panels);
  c_res->add_option("--angular", angular);
  add_common(c_res);

  int mat_n = 16;
  auto* c_ces = app.add_subcommand("cesaro-matrix", "monomial-basis truncation of T_g");
  c_ces->add_option("--g", g_spec)->required();
  c_ces->add_option("--n", mat_n);
  add_common(c_ces);

  std::string spec_mode;
  double spec_p = 2.0;
  int xi_count = 64;
  std::string sizes_spec = "16,32,64,128";
  auto* c_spec = app.add_subcommand("spectrum", "Cesaro spectral radius (b2 | eps | truncation)");
  c_spec->add_option("mode", spec_mode, "b2 | eps | truncation")->required();
  c_spec->add_option("--g", g_spec)->required();
  c_spec->add_option("--p", spec_p);
  c_spec->add_option("--xi-count", xi_count);
  c_spec->add_option("--tol", tol);
  c_spec->add_option("--max-level", max_level);
  c_spec->add_option("--pairs", pairs);
  c_spec->add_option("--eps-grid", eps_grid_spec);
  c_spec->add_option("--seed", seed);
  c_spec->add_option("--sizes", sizes_spec);
  add_common(c_spec);

  std::vector<std::string> merge_inputs;
  auto* c_merge = app.add_subcommand("report-merge", "merge JSON reports into one array");
  c_merge->add_option("inputs", merge_inputs, "report files")->required();
  add_common(c_merge);

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitInvalid;
  }
  try {
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  Output out{out_path, csv_path, !no_timestamp};

  try {
    if (*c_b2) {
      const auto w = parse_weight(weight_spec);
      weights::B2ScanOptions opts;
      opts.max_level = max_level;
      const auto rep = weights::b2_characteristic(w, carleson::Arc(0.0, 1.0), max_level, opts);
      json cfg{{"weight", weight_spec}, {"max_level", max_level}};
      if (!cache_path.empty()) {
        auto cache = carleson::QuadratureCache::load(cache_path);
        cache.put(w.fingerprint(), rep.argmax, max_level, rep.characteristic_sq);
        cache.save(cache_path);
        cfg["cache"] = cache_path;
      }
      if (!csv_path.empty()) {
        std::vector<double> lv(rep.level_sup.begin(), rep.level_sup.end());
        std::vector<double> idx(lv.size());
        for (size_t i = 0; i < lv.size(); ++i) idx[i] = static_cast<double>(i);
        report::write_csv(csv_path, {"level", "sup"}, {idx, lv});
      }
      return out.emit("b2-char", cfg, report::to_json(rep),
                      rep.status == carleson::QuadStatus::Converged ? kExitOk : kExitFlagged);
    }
    if (*c_gamma) {
      const auto w = parse_weight(weight_spec);
      const auto rep = weights::gamma(w, tol, max_level);
      json cfg{{"weight", weight_spec}, {"tol", tol}, {"max_level", max_level}};
      return out.emit("gamma", cfg, report::to_json(rep), kExitOk);
    }
    if (*c_osc) {
      const auto w = parse_weight(weight_spec);
      const double v = weights::oscillation_constant(w, pairs, seed, parse_metric(metric));
      json cfg{{"weight", weight_spec}, {"pairs", pairs}, {"seed", seed}, {"metric", metric}};
      return out.emit("osc-const", cfg, json{{"value", v}}, kExitOk);
    }
    if (*c_jn) {
      const auto w = parse_weight(weight_spec);
      std::vector<double> lams;
      for (int i = 0; i < lam_count; ++i) {
        lams.push_back(lam_min + (lam_max - lam_min) * i / std::max(1, lam_count - 1));
      }
      carleson::CarlesonSquare Q{carleson::Arc(arc_center, arc_length)};
      const auto prof = weights::jn_profile(w, Q, lams, samples, seed);
      json cfg{{"weight", weight_spec}, {"arc_center", arc_center},
               {"arc_length", arc_length}, {"samples", samples}, {"seed", seed}};
      if (!csv_path.empty()) {
        report::write_csv(csv_path, {"lambda", "tail"}, {prof.lambda_grid, prof.tail_fraction});
      }
      return out.emit("jn-profile", cfg, report::to_json(prof), kExitOk);
    }
    if (*c_bmo) {
      const auto w = parse_weight(weight_spec);
      const double v = weights::bmo_disc_norm(w, discs, per_disc, seed);
      json cfg{{"weight", weight_spec}, {"discs", discs}, {"samples_per_disc", per_disc},
               {"seed", seed}};
      return out.emit("bmo-norm", cfg, json{{"value", v}}, kExitOk);
    }
    if (*c_eps) {
      const auto w = parse_weight(weight_spec);
      const double v = weights::epsilon_condition(w, eps, pairs, seed, parse_metric(metric));
      json cfg{{"weight", weight_spec}, {"eps", eps}, {"pairs", pairs},
               {"seed", seed}, {"metric", metric}};
      return out.emit("eps-cond", cfg, json{{"value", v}}, kExitOk);
    }
    if (*c_sar) {
      json cfg{{"seed", seed}};
      if (sar_random > 0) {
        std::mt19937_64 rng(seed);
        int violations = 0;
        double worst_margin = 1e300;
        for (int k = 0; k < sar_random; ++k) {
          const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(sar_size - 1));
          std::vector<double> masses(n), values(n), logs(n);
          double total = 0.0;
          for (int i = 0; i < n; ++i) {
            masses[i] = 0.05 + uniform01(rng);
            total += masses[i];
          }
          for (int i = 0; i < n; ++i) masses[i] /= total;
          for (int i = 0; i < n; ++i) logs[i] = 2.0 * (uniform01(rng) - 0.5);
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
          const auto res = weights::sarason_check(values, masses);
          if (!res.bound_ok) ++violations;
          worst_margin = std::min(worst_margin, 4.0 * res.epsilon - res.variance);
        }
        cfg["random"] = sar_random;
        cfg["size_max"] = sar_size;
        return out.emit("sarason", cfg,
                        json{{"violations", violations}, {"worst_margin", worst_margin}},
                        violations == 0 ? kExitOk : kExitFlagged);
      }
      const auto res = weights::sarason_check(parse_list(sar_weights), parse_list(sar_masses));
      cfg["weights"] = sar_weights;
      cfg["masses"] = sar_masses;
      return out.emit("sarason", cfg, report::to_json(res),
                      res.bound_ok ? kExitOk : kExitFlagged);
    }
    if (*c_b1) {
      const auto w = parse_weight(weight_spec);
      std::vector<complexd> grid;
      for (int i = 0; i < z_count; ++i) {
        const double r = z_max * i / std::max(1, z_count - 1);
        grid.emplace_back(r, 0.0);
        if (i % 2 == 1) grid.emplace_back(0.0, r);
      }
      const auto res = weights::b1star_ratio(w, grid);
      json cfg{{"weight", weight_spec}, {"z_count", z_count}, {"z_max", z_max}};
      return out.emit("b1star", cfg, report::to_json(res),
                      res.status == carleson::QuadStatus::Converged ? kExitOk : kExitFlagged);
    }
    if (*c_sweep) {
      const auto w = parse_weight(weight_spec);
      std::vector<complexd> grid;
      for (int i = 0; i < z_count; ++i) {
        grid.emplace_back(z_max * i / std::max(1, z_count - 1), 0.0);
      }
      const auto reps = weights::conformal_sweep(w, grid, max_level);
      json arr = json::array();
      bool flagged = false;
      for (size_t i = 0; i < reps.size(); ++i) {
        json e = report::to_json(reps[i]);
        e["z"] = {grid[i].real(), grid[i].imag()};
        flagged = flagged || reps[i].status != carleson::QuadStatus::Converged;
        arr.push_back(e);
      }
      json cfg{{"weight", weight_spec}, {"z_count", z_count}, {"z_max", z_max},
               {"max_level", max_level}};
      return out.emit("conf-sweep", cfg, arr, flagged ? kExitFlagged : kExitOk);
    }
    if (*c_van) {
      const auto w = parse_weight(weight_spec);
      std::vector<double> deltas;
      for (int L = levels_min; L <= max_level; ++L) {
        const double h = std::pow(0.5, L - 1);
        deltas.push_back(h * (1.0 - (1.0 - h) * (1.0 - h)) * 1.001);
      }
      const auto prof = weights::vanishing_b2_profile(w, deltas, max_level);
      json cfg{{"weight", weight_spec}, {"max_level", max_level}, {"level_min", levels_min}};
      bool flagged = false;
      for (const auto& p : prof) {
        flagged = flagged || p.status != carleson::QuadStatus::Converged;
      }
      if (!csv_path.empty()) {
        std::vector<double> ds, vs;
        for (const auto& p : prof) {
          ds.push_back(p.delta);
          vs.push_back(p.value);
        }
        report::write_csv(csv_path, {"delta", "sup_product"}, {ds, vs});
      }
      return out.emit("vanishing-profile", cfg, report::to_json(prof),
                      flagged ? kExitFlagged : kExitOk);
    }
    if (*c_bloch) {
      const auto g = parse_function(g_spec);
      bloch::SeminormGrid grid;
      grid.max_depth = depth;
      const auto res = bloch::bloch_seminorm(g, grid);
      json cfg{{"g", g_spec}, {"depth", depth}};
      return out.emit("bloch-norm", cfg,
                      json{{"value", res.value},
                           {"argmax", {res.argmax.real(), res.argmax.imag()}}},
                      kExitOk);
    }
    if (*c_ce) {
      const auto spec = ce_spec == "factorial" ? bloch::LacunarySpec::Factorial
                                               : bloch::LacunarySpec::SuperLacunary;
      const auto ce = bloch::build_counterexample(spec, ce_terms);
      json diag;
      diag["exponents"] = ce.n;
      json floors = json::array();
      for (int j = std::max(2, ce_terms - 6); j < ce_terms; ++j) {
        const auto f = bloch::annulus_floor(ce, j, static_cast<int>(samples), seed);
        json e = report::to_json(f);
        e["j"] = j;
        floors.push_back(e);
      }
      diag["annulus_floors"] = floors;
      json offs = json::array();
      for (double M : {3.0, 5.0, 8.0}) {
        json e = report::to_json(bloch::off_annuli_sup(ce.g, ce.n, M));
        e["M"] = M;
        offs.push_back(e);
      }
      diag["off_annuli_sup"] = offs;
      json areas = json::array();
      double d = 0.01;
      for (int h = 0; h <= 6; ++h) {
        areas.push_back({{"delta", d},
                         {"value", bloch::area_function_truncated(ce.g, 0.05, complexd(1, 0), d)}});
        d /= 2;
      }
      diag["area_function"] = areas;
      const auto w = weights::Weight::exp_harmonic(ce.g, complexd(1.0, 0.0));
      json epsc = json::array();
      for (double e : {0.5, 0.25, 0.1}) {
        epsc.push_back({{"eps", e}, {"C", weights::epsilon_condition(w, e, pairs, seed)}});
      }
      diag["eps_condition"] = epsc;
      json cfg{{"spec", ce_spec}, {"terms", ce_terms}, {"samples", samples}, {"seed", seed}};
      return out.emit("counterexample", cfg, diag, kExitOk);
    }
    if (*c_area) {
      const auto g = parse_function(g_spec);
      json arr = json::array();
      double d = af_delta;
      for (int h = 0; h <= halvings; ++h) {
        arr.push_back(
            {{"delta", d},
             {"value", bloch::area_function_truncated(
                           g, af_eps, complexd(std::cos(xi_theta), std::sin(xi_theta)), d)}});
        d /= 2;
      }
      json cfg{{"g", g_spec}, {"eps", af_eps}, {"xi", xi_theta}, {"delta", af_delta},
               {"halvings", halvings}};
      return out.emit("area-function", cfg, arr, kExitOk);
    }
    if (*c_net) {
      const auto net = extension::build_net(separation, r_max, seed, parse_metric(metric));
      json cfg{{"separation", separation}, {"r_max", r_max}, {"seed", seed}, {"metric", metric}};
      return out.emit("net", cfg, report::to_json(net),
                      net.covering_warning ? kExitFlagged : kExitOk);
    }
    if (*c_dec) {
      const auto w = parse_weight(weight_spec);
      extension::DecomposeOptions opts;
      opts.r_max = r_max;
      opts.seed = seed;
      opts.max_level = max_level;
      const auto grep = weights::gamma(w, 0.005, max_level);
      double use_eps = eps;
      if (c_dec->count("--eps") == 0) use_eps = std::max(grep.value * 1.02, 0.01);
      const auto d = extension::decompose(w, use_eps, eta * use_eps, grep.value, opts);
      json cfg{{"weight", weight_spec}, {"eps", use_eps}, {"eta", eta}, {"r_max", r_max},
               {"seed", seed}, {"max_level", max_level}, {"gamma", grep.value}};
      return out.emit("decompose", cfg, report::to_json(d), kExitOk);
    }
    if (*c_sand) {
      const auto w = parse_weight(weight_spec);
      extension::DecomposeOptions opts;
      opts.r_max = r_max;
      opts.seed = seed;
      opts.max_level = max_level;
      const auto res = extension::theorem1_sandwich(w, tol, opts);
      json cfg{{"weight", weight_spec}, {"tol", tol}, {"r_max", r_max}, {"seed", seed}};
      return out.emit("sandwich", cfg, report::to_json(res), res.ok ? kExitOk : kExitFlagged);
    }
    if (*c_snorm) {
      const auto w = parse_weight(weight_spec);
      extension::DecomposeOptions opts;
      opts.r_max = r_max;
      opts.seed = seed;
      std::vector<double> grid = parse_list(eps_grid_spec);
      if (grid.empty()) {
        const auto grep = weights::gamma(w, 0.005, 10);
        for (double f : {1.05, 1.25, 1.5, 2.0, 3.0}) {
          grid.push_back(std::max(grep.value, 0.01) * f);
        }
      }
      const auto res = extension::s_norm_upper(w, grid, opts);
      json cfg{{"weight", weight_spec}, {"eps_grid", grid}, {"r_max", r_max}, {"seed", seed}};
      return out.emit("s-norm", cfg, report::to_json(res), kExitOk);
    }
    if (*c_proj || *c_res) {
      std::function<complexd(complexd)> f;
      if (f_spec == "abs2") {
        f = [](complexd z) { return complexd(std::norm(z), 0.0); };
      } else if (f_spec == "conj") {
        f = [](complexd z) { return std::conj(z); };
      } else {
        const auto fn = parse_function(f_spec);
        f = [fn](complexd z) { return fn.eval(z); };
      }
      operators::DiscQuadrature quad;
      quad.radial_panels = panels;
      quad.angular_nodes = angular;
      if (*c_proj) {
        const auto zs = parse_points(z_list);
        const auto vals = operators::project(f, zs, quad);
        json arr = json::array();
        for (size_t i = 0; i < zs.size(); ++i) {
          arr.push_back({{"z", {zs[i].real(), zs[i].imag()}},
                         {"value", {vals[i].real(), vals[i].imag()}}});
        }
        json cfg{{"f", f_spec}, {"z_list", z_list}, {"panels", panels}, {"angular", angular}};
        return out.emit("project", cfg, arr, kExitOk);
      }
      const auto zp = parse_points(z_point);
      std::vector<complexd> zetas;
      for (int i = 0; i < zeta_count; ++i) {
        const double th = kTau * i / zeta_count;
        zetas.push_back(0.65 * complexd(std::cos(th), std::sin(th)));
        zetas.push_back(0.3 * complexd(std::cos(th + 0.1), std::sin(th + 0.1)));
      }
      const double r0 =
          operators::conformal_identity_residual(f, DiskPoint(zp.at(0)), zetas, quad);
      const double r1 =
          operators::conformal_identity_residual(f, DiskPoint(zp.at(0)), zetas, quad.refined());
      json cfg{{"f", f_spec}, {"z", z_point}, {"zeta_count", zeta_count}, {"panels", panels},
               {"angular", angular}};
      return out.emit("confid-residual", cfg,
                      json{{"residual", r0}, {"residual_refined", r1}}, kExitOk);
    }
    if (*c_ces) {
      const auto g = parse_function(g_spec);
      const auto M = operators::cesaro_matrix(g, mat_n);
      json cfg{{"g", g_spec}, {"n", mat_n}};
      json res;
      res["n"] = M.N;
      res["strictly_lower_triangular"] = M.strictly_lower_triangular();
      res["truncation_radius"] = operators::truncation_spectral_radius(M);
      if (!csv_path.empty()) {
        std::vector<double> kk, nn, re, im;
        for (int k = 0; k < M.N; ++k) {
          for (int n = 0; n < M.N; ++n) {
            kk.push_back(k);
            nn.push_back(n);
            re.push_back(M.entry(k, n).real());
            im.push_back(M.entry(k, n).imag());
          }
        }
        report::write_csv(csv_path, {"k", "n", "re", "im"}, {kk, nn, re, im});
      }
      return out.emit("cesaro-matrix", cfg, res, kExitOk);
    }
    if (*c_spec) {
      const auto g = parse_function(g_spec);
      json cfg{{"mode", spec_mode}, {"g", g_spec}, {"p", spec_p}};
      if (spec_mode == "b2") {
        const auto rep = operators::spectral_radius_b2(g, spec_p, xi_count, tol, max_level);
        cfg["xi_count"] = xi_count;
        cfg["tol"] = tol;
        cfg["max_level"] = max_level;
        return out.emit("spectrum", cfg, report::to_json(rep),
                        rep.status == "ok" ? kExitOk : kExitFlagged);
      }
      if (spec_mode == "eps") {
        std::vector<double> grid = parse_list(eps_grid_spec);
        if (grid.empty()) grid = {2.5, 2.0, 1.5, 1.0, 0.5, 0.25, 0.1};
        const auto rep = operators::spectral_radius_eps(g, pairs, grid, seed);
        cfg["pairs"] = pairs;
        cfg["seed"] = seed;
        return out.emit("spectrum", cfg, report::to_json(rep),
                        rep.status == "ok" ? kExitOk : kExitFlagged);
      }
      if (spec_mode == "truncation") {
        std::vector<int> sizes;
        for (double v : parse_list(sizes_spec)) sizes.push_back(static_cast<int>(v));
        const auto rep = operators::truncation_radius_trace(g, sizes);
        cfg["sizes"] = sizes;
        return out.emit("spectrum", cfg, report::to_json(rep), kExitOk);
      }
      throw CLI::ValidationError("mode", "must be b2, eps or truncation");
    }
    if (*c_merge) {
      json arr = json::array();
      for (const auto& path : merge_inputs) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open report " + path);
        json j;
        in >> j;
        arr.push_back(std::move(j));
      }
      json cfg{{"inputs", merge_inputs}};
      return out.emit("report-merge", cfg, arr, kExitOk);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlagged;
  }
  return kExitInvalid;
}
