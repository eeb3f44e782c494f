#include "parisi/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "parisi/calculus.hpp"
#include "parisi/errors.hpp"
#include "parisi/finite_model.hpp"
#include "parisi/io.hpp"
#include "parisi/parallel.hpp"
#include "parisi/phase.hpp"

namespace parisi {

namespace {

struct Common {
  std::string spec_path;
  std::string config_path;
  std::string format;
  int jobs = 0;
  std::uint64_t seed = 1;
  int quad_nodes = 0;
  int grid_points = 0;
  int restarts = 0;
  std::string strategy;
  std::string csv_path;
  // One option per subcommand; at most one subcommand is parsed.
  std::vector<CLI::Option*> seed_opts;
  std::vector<CLI::Option*> csv_opts;
};

bool given(const std::vector<CLI::Option*>& opts) {
  return std::any_of(opts.begin(), opts.end(), [](const CLI::Option* o) { return o->count() > 0; });
}

struct Output {
  Json result = Json::object();
  /// Optional table (header plus rows) for csv output.
  std::vector<std::vector<std::string>> table;
  bool converged = true;
};

std::string csv_line(const std::vector<std::string>& row) {
  std::string s;
  for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
  return s + "\n";
}

std::string csv_table(const std::vector<std::vector<std::string>>& t) {
  std::string s;
  for (const auto& row : t) s += csv_line(row);
  return s;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::vector<std::string>>& rows) {
  if (j.is_object() || j.is_array()) {
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      const std::string key = j.is_object() ? it.key() : std::to_string(i);
      flatten(*it, prefix.empty() ? key : prefix + "." + key, rows);
    }
    return;
  }
  rows.push_back({prefix, j.is_number_float() ? format_double(j.get<double>(), 17)
                                              : (j.is_string() ? j.get<std::string>() : j.dump())});
}

std::string d17(double x) { return format_double(x, 17); }

std::string joined(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + d17(v[i]);
  return s;
}

Json opt_double(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

struct Context {
  RunConfig cfg;
  int jobs = 1;
  std::ostream* err = nullptr;

  MixtureSpec spec() const {
    if (!cfg.spec_path) throw ValidationError("--spec is required");
    return spec_from_json(read_json_file(*cfg.spec_path));
  }
};

Context resolve(const Common& c, std::ostream& err) {
  Context ctx;
  if (!c.config_path.empty()) ctx.cfg = run_config_from_json(read_json_file(c.config_path));
  if (!c.spec_path.empty()) ctx.cfg.spec_path = c.spec_path;
  if (!c.format.empty()) ctx.cfg.format = c.format;
  if (given(c.seed_opts)) ctx.cfg.seed = c.seed;
  if (c.quad_nodes > 0) ctx.cfg.quad.hermite_nodes = c.quad_nodes;
  if (c.grid_points > 0) ctx.cfg.quad.grid_points = c.grid_points;
  if (c.restarts > 0) ctx.cfg.opt.restarts = c.restarts;
  if (!c.strategy.empty()) ctx.cfg.opt.strategy = parse_strategy(c.strategy);
  if (given(c.csv_opts) && c.csv_path.empty()) ctx.cfg.format = "csv";
  ctx.cfg.opt.seed = ctx.cfg.seed;
  ctx.cfg.quad.validate();
  ctx.cfg.opt.validate();
  const std::set<std::string> formats{"human", "json", "csv"};
  if (!formats.count(ctx.cfg.format)) throw ValidationError("--format must be human, json or csv");
  ctx.jobs = resolve_jobs(c.jobs);
  ctx.err = &err;
  return ctx;
}

void warn_odd(const MixtureSpec& spec, std::ostream& err) {
  for (int p : spec.active_ps()) {
    if (p > 1 && p % 2 == 1) {
      err << "warning: odd p = " << p << " is outside the even-plus-linear class where the finite-N comparison is meaningful\n";
    }
  }
}

Json ladder_json(const LadderReport& r) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const LadderLevel& l = r.levels[i];
    levels.push_back(Json{{"k", l.k},
                          {"value", l.value},
                          {"measure", measure_to_json(l.measure)},
                          {"eps", r.eps[i]},
                          {"stationarity_max_residual", l.stationarity_max_residual},
                          {"certified", l.certified},
                          {"converged", l.converged},
                          {"alternatives", l.alternatives.size()}});
  }
  return levels;
}

Output cmd_eval(const Context& ctx, const std::string& measure_path, bool entropy, double ceiling) {
  const MixtureSpec spec = ctx.spec();
  if (measure_path.empty()) throw ValidationError("--measure is required");
  const DiscreteMeasure m = measure_from_json(read_json_file(measure_path));
  const FunctionalValue v =
      evaluate(spec, m, ctx.cfg.quad, ceiling > 0.0 ? std::optional<double>(ceiling) : std::nullopt);
  Output o;
  o.result = Json{{"value", entropy ? with_entropy(v.value) : v.value},
                  {"e_x0", v.e_x0},
                  {"correction", v.correction},
                  {"quad_error_estimate", v.quad_error_estimate},
                  {"with_entropy", entropy}};
  return o;
}

Output cmd_minimize(const Context& ctx, int k_max, const std::string& measure_out) {
  const MixtureSpec spec = ctx.spec();
  const LadderReport r = minimize_ladder(spec, k_max, ctx.cfg.opt, ctx.cfg.quad);
  Output o;
  o.converged = r.converged();
  o.result = Json{{"spec", spec_to_json(spec)},
                  {"k_max", k_max},
                  {"seed", ctx.cfg.seed},
                  {"levels", ladder_json(r)},
                  {"converged", o.converged}};
  o.table.push_back({"k", "value", "q", "m", "eps", "residual"});
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const LadderLevel& l = r.levels[i];
    o.table.push_back({std::to_string(l.k), d17(l.value), joined(l.measure.q()), joined(l.measure.m()), d17(r.eps[i]),
                       d17(l.stationarity_max_residual)});
  }
  if (!measure_out.empty()) {
    std::ofstream f(measure_out);
    if (!f) throw ValidationError("cannot write " + measure_out);
    f << dump_json(measure_to_json(r.top().measure));
  }
  return o;
}

Output cmd_grad_check(const Context& ctx, int p, int k_max, double y_min) {
  const MixtureSpec spec = ctx.spec();
  const LadderReport r = minimize_ladder(spec, k_max, ctx.cfg.opt, ctx.cfg.quad);
  const SubdifferentialProbe pr = subdifferential_probe(spec, p, r, ctx.cfg.quad, ctx.cfg.opt, y_min);
  Output o;
  o.converged = r.converged();
  Json cands = Json::array();
  for (std::size_t i = 0; i < pr.candidate_analytic.size(); ++i) {
    cands.push_back(Json{{"analytic", pr.candidate_analytic[i]}, {"contained", static_cast<bool>(pr.candidate_contained[i])}});
  }
  o.result = Json{{"p", p},
                  {"beta", pr.beta_value},
                  {"k", pr.k},
                  {"measure", measure_to_json(r.top().measure)},
                  {"eps_k", pr.eps_k},
                  {"y", pr.y},
                  {"curvature", pr.curvature},
                  {"value_minus", pr.value_minus},
                  {"value_center", pr.value_center},
                  {"value_plus", pr.value_plus},
                  {"lower", pr.lower},
                  {"upper", pr.upper},
                  {"analytic", pr.analytic},
                  {"analytic_label", BetaDerivative::kLabel},
                  {"fd_at_measure", dP_dbeta_fd(spec, r.top().measure, p, 1e-3, ctx.cfg.quad)},
                  {"slack", pr.slack},
                  {"contained", pr.contained},
                  {"tight_contained", pr.tight_contained},
                  {"candidates", cands},
                  {"converged", o.converged}};
  return o;
}

Output cmd_moments(const Context& ctx, const std::vector<int>& ps, int k_max) {
  const MixtureSpec spec = ctx.spec();
  const LadderReport r = minimize_ladder(spec, k_max, ctx.cfg.opt, ctx.cfg.quad);
  Output o;
  o.converged = r.converged();
  Json rows = Json::array();
  o.table.push_back({"p", "moment", "outside_guarantee"});
  for (int p : ps) {
    const MomentPrediction mp = overlap_moment_limit(spec, r, p);
    rows.push_back(Json{{"p", p}, {"value", mp.value}, {"outside_guarantee", mp.outside_guarantee}});
    o.table.push_back({std::to_string(p), d17(mp.value), mp.outside_guarantee ? "true" : "false"});
  }
  o.result = Json{{"k_max", k_max}, {"measure", measure_to_json(r.top().measure)}, {"moments", rows}, {"converged", o.converged}};
  return o;
}

Output cmd_classify(const Context& ctx, int k_max, double tol) {
  const MixtureSpec spec = ctx.spec();
  const PhaseDiagnostics d = classify(spec, k_max, tol, ctx.cfg.quad, ctx.cfg.opt);
  Output o;
  o.converged = d.ladder.converged();
  Json gaps = Json::object();
  for (const auto& [k, v] : d.moment_gap) gaps[std::to_string(k.first) + "," + std::to_string(k.second)] = v;
  Json moments = Json::object();
  for (const auto& [p, v] : d.moments) moments[std::to_string(p)] = v;
  o.result = Json{{"is_rs", d.is_rs},
                  {"indeterminate", d.indeterminate},
                  {"rs_margin", d.rs_margin},
                  {"rs_reference", d.rs_reference},
                  {"rs_reference_value", d.rs_reference_value},
                  {"ladder_value", d.ladder_value},
                  {"best_dirac_q", d.best_dirac_q},
                  {"best_dirac_value", d.best_dirac_value},
                  {"measure", measure_to_json(d.measure)},
                  {"l1_spread", d.l1_spread},
                  {"moments", moments},
                  {"moment_gap", gaps},
                  {"variance_proxy", d.variance_proxy},
                  {"symmetric_witness", d.symmetric_witness},
                  {"spread_witness", d.spread_witness},
                  {"conjectural", d.conjectural},
                  {"converged", o.converged}};
  return o;
}

struct Sweep {
  int p = 2;
  double a = 0.0, b = 0.0, step = 0.0;
};

Sweep parse_sweep(const std::string& s) {
  Sweep w;
  char tail = 0;
  if (std::sscanf(s.c_str(), "p=%d:%lf:%lf:%lf%c", &w.p, &w.a, &w.b, &w.step, &tail) != 4) {
    throw ValidationError("--sweep expects p=P:START:STOP:STEP, got \"" + s + "\"");
  }
  if (w.p < 1) throw ValidationError("--sweep: p must be >= 1");
  return w;
}

Output cmd_phase_scan(const Context& ctx, const std::string& sweep, int k_max, double tol, double resolution) {
  const MixtureSpec base = ctx.spec();
  const Sweep w = parse_sweep(sweep);
  const BoundaryScan scan =
      boundary_scan(base, w.p, beta_grid(w.a, w.b, w.step), k_max, tol, ctx.cfg.quad, ctx.cfg.opt, ctx.jobs, resolution);
  Output o;
  std::vector<int> ps;
  for (const auto& [p, v] : scan.rows.front().moments) ps.push_back(p);
  o.table.push_back({"beta", "rs_margin", "is_rs", "best_dirac_q", "l1_spread", "variance_proxy"});
  for (int p : ps) o.table[0].push_back("moment_" + std::to_string(p));
  Json rows = Json::array();
  for (const BoundaryRow& r : scan.rows) {
    std::vector<std::string> line{d17(r.beta), d17(r.rs_margin), r.is_rs ? "true" : "false", d17(r.best_dirac_q),
                                  d17(r.l1_spread), d17(r.variance_proxy)};
    Json moments = Json::object();
    for (int p : ps) {
      const double v = r.moments.count(p) ? r.moments.at(p) : 0.0;
      line.push_back(d17(v));
      moments[std::to_string(p)] = v;
    }
    o.table.push_back(line);
    rows.push_back(Json{{"beta", r.beta},
                        {"rs_margin", r.rs_margin},
                        {"is_rs", r.is_rs},
                        {"indeterminate", r.indeterminate},
                        {"best_dirac_q", r.best_dirac_q},
                        {"l1_spread", r.l1_spread},
                        {"variance_proxy", r.variance_proxy},
                        {"moments", moments},
                        {"oracle_nontrivial", r.oracle_nontrivial}});
  }
  o.result = Json{{"p", w.p},
                  {"beta_c", opt_double(scan.beta_c)},
                  {"oracle_beta_c", opt_double(scan.oracle_beta_c)},
                  {"single_flip", scan.single_flip},
                  {"note", scan.note},
                  {"rows", rows}};
  const bool pure2 = w.p == 2 && base.h() == 0.0 && base.active_ps() == std::vector<int>{2};
  if (pure2) {
    // Alternative normalization with RS region beta^2 <= 2.
    o.result["alt_beta_c"] = std::sqrt(2.0);
    o.result["linearized_beta_c"] = std::sqrt(0.5);
  }
  return o;
}

Json estimate_json(const Estimate& e) { return Json{{"mean", e.mean}, {"stderr", e.stderr_}}; }

Output cmd_sk_exact(const Context& ctx, int n, int samples, const std::vector<int>& ps) {
  const MixtureSpec spec = ctx.spec();
  warn_odd(spec, *ctx.err);
  const DisorderAverage a = disorder_average(spec, n, ps, samples, ctx.cfg.seed, ctx.jobs);
  Output o;
  Json moments = Json::object();
  o.table.push_back({"quantity", "mean", "stderr"});
  o.table.push_back({"F_n", d17(a.free_energy.mean), d17(a.free_energy.stderr_)});
  for (const auto& [p, e] : a.moments) {
    moments[std::to_string(p)] = estimate_json(e);
    o.table.push_back({"moment_" + std::to_string(p), d17(e.mean), d17(e.stderr_)});
  }
  o.table.push_back({"overlap_mean", d17(a.overlap_mean.mean), d17(a.overlap_mean.stderr_)});
  o.table.push_back({"overlap_mean_variance", d17(a.overlap_mean_variance.mean), d17(a.overlap_mean_variance.stderr_)});
  o.result = Json{{"n", n},
                  {"samples", samples},
                  {"seed", ctx.cfg.seed},
                  {"free_energy", estimate_json(a.free_energy)},
                  {"moments", moments},
                  {"overlap_mean", estimate_json(a.overlap_mean)},
                  {"overlap_mean_variance", estimate_json(a.overlap_mean_variance)}};
  return o;
}

Output cmd_sk_compare(const Context& ctx, int n, int samples, int k_max, std::vector<int> ps) {
  const MixtureSpec spec = ctx.spec();
  warn_odd(spec, *ctx.err);
  if (ps.empty()) ps = spec.active_ps();
  const LadderReport r = minimize_ladder(spec, k_max, ctx.cfg.opt, ctx.cfg.quad);
  const DisorderAverage a = disorder_average(spec, n, ps, samples, ctx.cfg.seed, ctx.jobs);
  Output o;
  o.converged = r.converged();
  o.table.push_back({"quantity", "finite_n", "stderr", "parisi"});
  Json rows = Json::array();
  auto add = [&](const std::string& name, const Estimate& e, double parisi) {
    o.table.push_back({name, d17(e.mean), d17(e.stderr_), d17(parisi)});
    rows.push_back(Json{{"quantity", name}, {"finite_n", e.mean}, {"stderr", e.stderr_}, {"parisi", parisi}});
  };
  add("free_energy", a.free_energy, with_entropy(r.top().value));
  for (int p : ps) add("moment_" + std::to_string(p), a.moments.at(p), moment(r.top().measure, p));
  o.result = Json{{"n", n},
                  {"samples", samples},
                  {"k_max", k_max},
                  {"measure", measure_to_json(r.top().measure)},
                  {"rows", rows},
                  {"converged", o.converged}};
  return o;
}

void add_common(CLI::App* sub, Common& c, bool with_csv) {
  sub->add_option("--spec", c.spec_path, "Spec file {\"coeffs\": {\"2\": 1.0}, \"h\": 0.0}");
  sub->add_option("--config", c.config_path, "Run config file (spec, format, seed, quadrature, optimizer)");
  sub->add_option("--format", c.format, "Output format: human (default), json or csv");
  sub->add_option("--jobs", c.jobs, "Worker threads (default: PARISI_JOBS or hardware count)");
  c.seed_opts.push_back(sub->add_option("--seed", c.seed, "Global seed (default 1)"));
  sub->add_option("--quad-nodes", c.quad_nodes, "Gauss-Hermite nodes (default 40)");
  sub->add_option("--grid-points", c.grid_points, "Grid points of the layer recursion (default 1025)");
  sub->add_option("--restarts", c.restarts, "Random restarts per level (default 8)");
  sub->add_option("--strategy", c.strategy, "Local search: simplex (default) or gradient");
  if (with_csv) {
    c.csv_opts.push_back(
        sub->add_option("--csv", c.csv_path, "Write the table as CSV to a file (stdout when no path)")->expected(0, 1));
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parisi functional evaluation and minimization for mixed p-spin models", "parisi"};
  app.require_subcommand(1);
  Common c;

  std::string measure_path, measure_out, sweep;
  bool entropy = false;
  double ceiling = 0.0, y_min = 1e-4, tol = 1e-7, resolution = 1e-3;
  int k_max = 4, p = 2, n = 12, samples = 200;
  std::vector<int> ps;

  auto* eval = app.add_subcommand("eval", "Evaluate P(m, beta) for a measure");
  add_common(eval, c, false);
  eval->add_option("--measure", measure_path, "Measure file {\"q\": [...], \"m\": [...]}");
  eval->add_flag("--with-entropy", entropy, "Add log 2");
  eval->add_option("--error-ceiling", ceiling, "Fail when the quadrature error estimate exceeds this");

  auto* minimize = app.add_subcommand("minimize", "Ladder of k-atom minimizers");
  add_common(minimize, c, true);
  minimize->add_option("--k-max", k_max, "Largest number of atoms (default 4)");
  minimize->add_option("--measure-out", measure_out, "Write the top minimizer as a measure file");

  auto* grad = app.add_subcommand("grad-check", "Subgradient sandwich for d/d beta_p");
  add_common(grad, c, false);
  grad->add_option("--p", p, "Term index")->required();
  grad->add_option("--k-max", k_max, "Ladder depth (default 4)");
  grad->add_option("--y-min", y_min, "Smallest probe step (default 1e-4)");

  auto* moments = app.add_subcommand("moments", "Predicted limiting overlap moments");
  add_common(moments, c, true);
  moments->add_option("--p", ps, "Moment orders")->required();
  moments->add_option("--k-max", k_max, "Ladder depth (default 4)");

  auto* cls = app.add_subcommand("classify", "RS / RSB classification with witnesses");
  add_common(cls, c, false);
  cls->add_option("--k-max", k_max, "Ladder depth (default 4)");
  cls->add_option("--tol", tol, "RS margin tolerance (default 1e-7)");

  auto* scan = app.add_subcommand("phase-scan", "Sweep one coefficient and locate the RS boundary");
  add_common(scan, c, true);
  scan->add_option("--sweep", sweep, "p=P:START:STOP:STEP")->required();
  scan->add_option("--k-max", k_max, "Ladder depth (default 4)");
  scan->add_option("--tol", tol, "RS margin tolerance (default 1e-7)");
  scan->add_option("--resolution", resolution, "Bisection resolution for beta_c (default 1e-3)");

  auto* exact = app.add_subcommand("sk-exact", "Exact enumeration averaged over disorder");
  add_common(exact, c, true);
  exact->add_option("--n", n, "Spins (default 12)");
  exact->add_option("--samples", samples, "Disorder samples (default 200)");
  exact->add_option("--moments", ps, "Overlap moment orders (default 2)");

  auto* compare = app.add_subcommand("sk-compare", "Finite-N averages next to Parisi predictions");
  add_common(compare, c, true);
  compare->add_option("--n", n, "Spins (default 12)");
  compare->add_option("--samples", samples, "Disorder samples (default 200)");
  compare->add_option("--k-max", k_max, "Ladder depth (default 4)");
  compare->add_option("--moments", ps, "Overlap moment orders (default: active p)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const Context ctx = resolve(c, err);
    Output o;
    if (*eval) {
      o = cmd_eval(ctx, measure_path, entropy, ceiling);
    } else if (*minimize) {
      o = cmd_minimize(ctx, k_max, measure_out);
    } else if (*grad) {
      o = cmd_grad_check(ctx, p, k_max, y_min);
    } else if (*moments) {
      o = cmd_moments(ctx, ps, k_max);
    } else if (*cls) {
      o = cmd_classify(ctx, k_max, tol);
    } else if (*scan) {
      o = cmd_phase_scan(ctx, sweep, k_max, tol, resolution);
    } else if (*exact) {
      if (ps.empty()) ps = {2};
      o = cmd_sk_exact(ctx, n, samples, ps);
    } else {
      o = cmd_sk_compare(ctx, n, samples, k_max, ps);
    }
    if (!c.csv_path.empty()) {
      std::ofstream f(c.csv_path);
      if (!f) throw ValidationError("cannot write " + c.csv_path);
      f << csv_table(o.table);
    }
    if (ctx.cfg.format == "json") {
      out << dump_json(o.result);
    } else if (ctx.cfg.format == "csv") {
      if (o.table.empty()) {
        std::vector<std::vector<std::string>> rows{{"key", "value"}};
        flatten(o.result, "", rows);
        out << csv_table(rows);
      } else {
        out << csv_table(o.table);
      }
    } else {
      out << dump_human(o.result);
    }
    if (!o.converged) {
      err << "warning: optimizer did not converge\n";
      return kExitNonConvergence;
    }
    return kExitOk;
  } catch (const ResolutionError& e) {
    err << "error: " << e.what() << " (estimate " << e.estimate() << ")\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace parisi
