#include "b2disc/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace b2disc::report {

namespace {

json finite_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  if (std::isnan(v)) return json("nan");
  return json(v);
}

json square_json(const carleson::SquareId& id, double center, double length) {
  return json{{"level", id.level}, {"index", id.index}, {"shift", id.shift},
              {"arc_center", center}, {"arc_length", length}};
}

}  // namespace

json to_json(const weights::B2Report& r) {
  json j;
  j["characteristic_sq"] = finite_or_string(r.characteristic_sq);
  j["status"] = carleson::to_string(r.status);
  j["max_level"] = r.max_level;
  j["shifts"] = r.shifts;
  j["argmax_square"] = square_json(r.argmax, r.argmax_arc_center, r.argmax_arc_length);
  json levels = json::array();
  for (double v : r.level_sup) levels.push_back(finite_or_string(v));
  j["level_sup"] = levels;
  j["growth_last"] = finite_or_string(r.growth_last);
  j["quadrature"] = r.quadrature;
  j["weight"] = r.weight_id;
  j["metric_convention"] = to_string(r.convention);
  return j;
}

json to_json(const weights::GammaReport& r) {
  json j;
  j["value"] = r.value;
  j["bracket_lower"] = r.lower;
  j["tol"] = r.tol;
  j["max_level"] = r.max_level;
  json trace = json::array();
  for (const auto& [t, ok] : r.trace) trace.push_back({{"t", t}, {"member", ok}});
  j["trace"] = trace;
  j["weight"] = r.weight_id;
  return j;
}

json to_json(const weights::JNProfile& r) {
  json j;
  j["arc_center"] = r.arc_center;
  j["arc_length"] = r.arc_length;
  j["lambda"] = r.lambda_grid;
  j["tail_fraction"] = r.tail_fraction;
  j["eps_fit"] = r.eps_fit;
  j["stat_error"] = r.stat_error;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  return j;
}

json to_json(const weights::SarasonResult& r) {
  return json{{"epsilon", r.epsilon}, {"variance", r.variance}, {"bound_ok", r.bound_ok}};
}

json to_json(const weights::B1StarResult& r) {
  json j;
  j["max_ratio"] = finite_or_string(r.max_ratio);
  j["status"] = carleson::to_string(r.status);
  json pts = json::array();
  for (const auto& [z, v] : r.ratios) {
    pts.push_back({{"re", z.real()}, {"im", z.imag()}, {"ratio", finite_or_string(v)}});
  }
  j["ratios"] = pts;
  return j;
}

json to_json(const std::vector<weights::VanishingProfilePoint>& profile) {
  json arr = json::array();
  for (const auto& p : profile) {
    arr.push_back({{"delta", p.delta},
                   {"value", finite_or_string(p.value)},
                   {"status", carleson::to_string(p.status)}});
  }
  return arr;
}

json to_json(const extension::HyperbolicNet& n) {
  json j;
  j["separation"] = n.separation;
  j["r_max"] = n.r_max;
  j["covering_radius"] = n.covering_radius;
  j["covering_warning"] = n.covering_warning;
  j["metric_convention"] = to_string(n.convention);
  json pts = json::array();
  for (complexd p : n.points) pts.push_back({p.real(), p.imag()});
  j["points"] = pts;
  return j;
}

json to_json(const extension::Decomposition& d) {
  json j;
  j["trivial"] = d.trivial;
  j["lipschitz_L"] = d.lipschitz_L;
  j["eps"] = d.eps;
  j["eta"] = d.eta;
  j["c_eps"] = d.c_eps;
  j["u_sup"] = d.u_sup;
  j["v_lip"] = d.v_lip;
  j["probes"] = d.probes;
  j["metric_convention"] = to_string(d.convention);
  j["net"] = to_json(d.net);
  j["net_values"] = d.net_values;
  return j;
}

json to_json(const extension::SandwichResult& s) {
  json j;
  j["gamma"] = s.gamma_value;
  j["dist_upper"] = s.dist_upper;
  j["dist_lower"] = s.dist_lower;
  j["ok"] = s.ok;
  j["status"] = s.status;
  j["decomposition"] = to_json(s.decomposition);
  return j;
}

json to_json(const extension::SNormResult& s) {
  json j;
  j["value"] = s.value;
  j["best_eps"] = s.best_eps;
  json trace = json::array();
  for (const auto& [e, v] : s.trace) trace.push_back({{"eps", e}, {"u_sup_plus_v_lip", finite_or_string(v)}});
  j["trace"] = trace;
  return j;
}

json to_json(const bloch::AnnulusFloor& f) {
  return json{{"floor", f.floor},
              {"main_term", f.main_term},
              {"correction_lower", f.correction_lower},
              {"correction_upper", f.correction_upper}};
}

json to_json(const bloch::OffAnnuliSup& s) {
  return json{{"value", s.value},
              {"coverage_warning", s.coverage_warning},
              {"argmax", {s.argmax.real(), s.argmax.imag()}}};
}

json to_json(const operators::SpectrumReport& r) {
  json j;
  j["method"] = r.method;
  j["p"] = r.p;
  j["radius"] = r.radius;
  j["status"] = r.status;
  j["xi_count"] = r.xi_count;
  j["tol"] = r.tol;
  j["seed"] = r.seed;
  json bt = json::array();
  for (const auto& [l, ok] : r.bisection_trace) bt.push_back({{"lambda", l}, {"pass", ok}});
  j["bisection_trace"] = bt;
  json et = json::array();
  for (const auto& [e, g] : r.eps_trace) et.push_back({{"eps", e}, {"stability_gap", g}});
  j["eps_trace"] = et;
  return j;
}

json to_json(const operators::TruncationTrace& t) {
  json j;
  j["radius"] = t.radius;
  j["status"] = t.status;
  json tr = json::array();
  for (const auto& [n, r] : t.trace) tr.push_back({{"N", n}, {"radius", r}});
  j["trace"] = tr;
  return j;
}

json envelope(const std::string& kind, json config, json result, bool with_timestamp) {
  json j;
  j["kind"] = kind;
  j["config"] = std::move(config);
  j["result"] = std::move(result);
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::ostringstream os;
    os << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
    j["generated_at"] = os.str();
  }
  return j;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (columns.size() != header.size()) {
    throw std::invalid_argument("write_csv: header/column count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out.precision(17);
  for (size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  const size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns");
  }
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c) {
      out << columns[c][r] << (c + 1 < columns.size() ? "," : "\n");
    }
  }
}

}  // namespace b2disc::report
