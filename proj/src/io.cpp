#include "parisi/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "parisi/errors.hpp"

namespace parisi {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ValidationError(where + ": unknown key \"" + key + "\"");
  }
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

std::int64_t integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, where));
  return out;
}

std::string scalar(const Json& j, int digits) {
  if (j.is_number_float()) return format_double(j.get<double>(), digits);
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  if (j.is_object() || j.is_array()) {
    const bool obj = j.is_object();
    if (j.empty()) {
      out += obj ? "{}" : "[]";
      return;
    }
    const bool flat = !obj && std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_primitive(); });
    out += obj ? "{" : "[";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += flat ? ", " : ",";
      first = false;
      if (!flat) out += "\n" + pad;
      if (obj) out += Json(it.key()).dump() + ": ";
      dump_rec(*it, indent, depth + 1, out);
    }
    if (!flat) out += "\n" + close;
    out += obj ? "}" : "]";
    return;
  }
  if (j.is_number_float()) {
    const double x = j.get<double>();
    out += std::isfinite(x) ? format_double(x, 17) : "null";
    return;
  }
  out += j.dump();
}

void human_rec(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string label = j.is_object() ? it.key() : "- ";
    if (it->is_object() || (it->is_array() && !std::all_of(it->begin(), it->end(), [](const Json& v) { return v.is_primitive(); }))) {
      out += pad + (j.is_object() ? label + ":" : "-") + "\n";
      human_rec(*it, depth + 1, out);
    } else if (it->is_array()) {
      std::string row;
      for (const auto& v : *it) row += (row.empty() ? "" : " ") + scalar(v, 6);
      out += pad + label + (j.is_object() ? ": " : "") + row + "\n";
    } else {
      out += pad + label + (j.is_object() ? ": " : "") + scalar(*it, 6) + "\n";
    }
  }
}

}  // namespace

MixtureSpec spec_from_json(const Json& j) {
  reject_unknown(j, {"coeffs", "h", "allow_degenerate"}, "spec");
  if (!j.contains("coeffs") || !j["coeffs"].is_object()) throw ValidationError("spec: \"coeffs\" object required");
  std::vector<Term> terms;
  for (const auto& [key, value] : j["coeffs"].items()) {
    std::size_t used = 0;
    int p = 0;
    try {
      p = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || key.empty()) throw ValidationError("spec: coefficient key \"" + key + "\" is not an integer");
    terms.push_back({p, number(value, "spec.coeffs." + key)});
  }
  const double h = j.contains("h") ? number(j["h"], "spec.h") : 0.0;
  bool degenerate = false;
  if (j.contains("allow_degenerate")) {
    if (!j["allow_degenerate"].is_boolean()) throw ValidationError("spec.allow_degenerate: expected a boolean");
    degenerate = j["allow_degenerate"].get<bool>();
  }
  return MixtureSpec(std::move(terms), h, degenerate);
}

Json spec_to_json(const MixtureSpec& spec) {
  Json coeffs = Json::object();
  for (const Term& t : spec.terms()) coeffs[std::to_string(t.p)] = t.beta;
  Json j{{"coeffs", coeffs}, {"h", spec.h()}};
  if (spec.allow_degenerate()) j["allow_degenerate"] = true;
  return j;
}

DiscreteMeasure measure_from_json(const Json& j) {
  reject_unknown(j, {"q", "m"}, "measure");
  if (!j.contains("q") || !j.contains("m")) throw ValidationError("measure: \"q\" and \"m\" required");
  const auto q = numbers(j["q"], "measure.q");
  const auto m = numbers(j["m"], "measure.m");
  return DiscreteMeasure::make(q, m);
}

Json measure_to_json(const DiscreteMeasure& m) {
  return Json{{"q", std::vector<double>(m.q().begin(), m.q().end())},
              {"m", std::vector<double>(m.m().begin(), m.m().end())}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string format_double(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out + "\n";
}

std::string dump_human(const Json& j) {
  std::string out;
  if (j.is_object() || j.is_array()) {
    human_rec(j, 0, out);
  } else {
    out = scalar(j, 6) + "\n";
  }
  return out;
}

RunConfig run_config_from_json(const Json& j) {
  reject_unknown(j, {"spec", "format", "seed", "quadrature", "optimizer"}, "config");
  RunConfig c;
  if (j.contains("spec")) {
    if (!j["spec"].is_string()) throw ValidationError("config.spec: expected a path");
    c.spec_path = j["spec"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string()) throw ValidationError("config.format: expected a string");
    c.format = j["format"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ValidationError("config.seed: expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("quadrature")) {
    const Json& q = j["quadrature"];
    reject_unknown(q, {"hermite_nodes", "grid_points", "grid_halfwidth_sigmas", "interpolation_order"}, "config.quadrature");
    if (q.contains("hermite_nodes")) c.quad.hermite_nodes = static_cast<int>(integer(q["hermite_nodes"], "hermite_nodes"));
    if (q.contains("grid_points")) c.quad.grid_points = static_cast<int>(integer(q["grid_points"], "grid_points"));
    if (q.contains("grid_halfwidth_sigmas")) {
      c.quad.grid_halfwidth_sigmas = number(q["grid_halfwidth_sigmas"], "grid_halfwidth_sigmas");
    }
    if (q.contains("interpolation_order")) {
      c.quad.interpolation_order = static_cast<int>(integer(q["interpolation_order"], "interpolation_order"));
    }
    c.quad.validate();
  }
  if (j.contains("optimizer")) {
    const Json& o = j["optimizer"];
    reject_unknown(o, {"restarts", "max_iters", "value_tol", "stationarity_tol", "tie_tol", "strategy"}, "config.optimizer");
    if (o.contains("restarts")) c.opt.restarts = static_cast<int>(integer(o["restarts"], "restarts"));
    if (o.contains("max_iters")) c.opt.max_iters = static_cast<int>(integer(o["max_iters"], "max_iters"));
    if (o.contains("value_tol")) c.opt.value_tol = number(o["value_tol"], "value_tol");
    if (o.contains("stationarity_tol")) c.opt.stationarity_tol = number(o["stationarity_tol"], "stationarity_tol");
    if (o.contains("tie_tol")) c.opt.tie_tol = number(o["tie_tol"], "tie_tol");
    if (o.contains("strategy")) {
      if (!o["strategy"].is_string()) throw ValidationError("config.optimizer.strategy: expected a string");
      c.opt.strategy = parse_strategy(o["strategy"].get<std::string>());
    }
    c.opt.validate();
  }
  return c;
}

}  // namespace parisi
