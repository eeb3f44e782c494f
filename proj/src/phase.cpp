#include "parisi/phase.hpp"

#include <algorithm>
#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/parallel.hpp"
#include "parisi/quadrature.hpp"
#include "parisi/rng.hpp"

namespace parisi {

namespace {

constexpr int kDiracGrid = 1001;
constexpr int kOracleGrid = 2001;
constexpr int kOracleNodes = 200;
constexpr double kWitnessTolerance = 1e-4;

}  // namespace

DiracOptimum rs_best_dirac(const MixtureSpec& spec, const QuadratureConfig& quad) {
  DiracOptimum best{0.0, rs_closed_form(spec, 0.0, quad)};
  int best_i = 0;
  for (int i = 1; i < kDiracGrid; ++i) {
    const double q = static_cast<double>(i) / (kDiracGrid - 1);
    const double v = rs_closed_form(spec, q, quad);
    if (v < best.value) {
      best = {q, v};
      best_i = i;
    }
  }
  const double h = 1.0 / (kDiracGrid - 1);
  double a = std::max(0.0, (best_i - 1) * h);
  double b = std::min(1.0, (best_i + 1) * h);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = rs_closed_form(spec, c, quad);
  double fd = rs_closed_form(spec, d, quad);
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = rs_closed_form(spec, c, quad);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = rs_closed_form(spec, d, quad);
    }
  }
  const double q = 0.5 * (a + b);
  const double v = rs_closed_form(spec, q, quad);
  // Flat objectives keep the grid point (smallest q among equals).
  if (v < best.value - 1e-15) best = {q, v};
  return best;
}

double fixed_point_residual(const MixtureSpec& spec, double q) {
  const auto rule = gauss_hermite(kOracleNodes);
  const double s = std::sqrt(xi_prime(spec, q));
  const double h = spec.h();
  double e = 0.0;
  for (std::size_t j = 0; j < rule->nodes.size(); ++j) {
    const double t = std::tanh(s * rule->nodes[j] + h);
    e += rule->weights[j] * t * t;
  }
  return q - e;
}

std::vector<double> fixed_point_oracle(const MixtureSpec& spec) {
  std::vector<double> roots;
  // Uniform grid plus geometric points in (0, 1/(grid-1)) so that small roots near
  // a bifurcation from 0 are still bracketed.
  std::vector<double> x{0.0};
  for (int e = -100; e < -30; ++e) x.push_back(std::pow(10.0, e / 10.0));
  for (int i = 1; i < kOracleGrid; ++i) x.push_back(static_cast<double>(i) / (kOracleGrid - 1));
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = fixed_point_residual(spec, x[i]);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (g[i] == 0.0) {
      roots.push_back(x[i]);
      continue;
    }
    if (i + 1 < x.size() && g[i + 1] != 0.0 && (g[i] < 0.0) != (g[i + 1] < 0.0)) {
      double a = x[i];
      double b = x[i + 1];
      double ga = g[i];
      for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = fixed_point_residual(spec, mid);
        if (gm == 0.0) {
          a = b = mid;
          break;
        }
        if ((gm < 0.0) == (ga < 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
  }
  return roots;
}

PhaseDiagnostics classify(const MixtureSpec& spec, int k_max, double tol, const QuadratureConfig& quad,
                          const OptimizerOptions& opts) {
  if (!(tol > 0.0)) throw ValidationError("classify: tol must be positive");
  PhaseDiagnostics d;
  const DiracOptimum dirac = rs_best_dirac(spec, quad);
  d.best_dirac_q = dirac.q;
  d.best_dirac_value = dirac.value;
  const bool symmetric = spec.spin_flip_symmetric();
  if (symmetric) {
    // With sigma -> -sigma symmetry the only Dirac measure that can minimize is delta_0.
    d.rs_reference = "delta_0";
    d.rs_reference_value = rs_closed_form(spec, 0.0, quad);
  } else {
    d.rs_reference = "best_dirac";
    d.rs_reference_value = dirac.value;
  }
  d.ladder = minimize_ladder(spec, k_max, opts, quad, {DiscreteMeasure::dirac(dirac.q)});
  d.ladder_value = d.ladder.top().value;
  d.rs_margin = d.rs_reference_value - d.ladder_value;
  d.is_rs = d.rs_margin <= tol;
  d.indeterminate = d.rs_margin > 0.25 * tol && d.rs_margin < 4.0 * tol;
  d.measure = d.ladder.top().measure;
  d.l1_spread = l1_spread(d.measure);
  const std::vector<int> ps = spec.active_ps();
  for (const Term& t : spec.terms()) d.moments[t.p] = moment(d.measure, t.p);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const int p1 = ps[i];
      const int p2 = ps[j];
      d.moment_gap[{p1, p2}] = std::pow(moment(d.measure, p1), 1.0 / p1) - std::pow(moment(d.measure, p2), 1.0 / p2);
    }
  }
  const double mean = moment(d.measure, 1);
  d.variance_proxy = moment(d.measure, 2) - mean * mean;
  for (std::size_t l = 0; l < d.measure.size(); ++l) {
    const double dev = d.measure.q()[l] - mean;
    d.variance_direct += d.measure.jump(l) * dev * dev;
  }
  std::vector<int> even;
  for (int p : ps) {
    if (p % 2 == 0) even.push_back(p);
  }
  if (!d.is_rs && spec.h() == 0.0 && !even.empty()) {
    d.symmetric_witness = std::all_of(even.begin(), even.end(), [&](int p) { return d.moments[p] > 0.0; });
  }
  if (!d.is_rs && even.size() >= 2) {
    bool gap = false;
    for (std::size_t i = 0; i < even.size(); ++i) {
      for (std::size_t j = i + 1; j < even.size(); ++j) gap = gap || d.moment_gap[{even[i], even[j]}] < -kWitnessTolerance;
    }
    d.spread_witness = gap && d.variance_proxy > kWitnessTolerance;
  }
  const bool two_spin_only = std::all_of(ps.begin(), ps.end(), [](int p) { return p <= 2; });
  d.conjectural = two_spin_only && spec.h() != 0.0;
  return d;
}

std::vector<double> beta_grid(double a, double b, double step) {
  if (!(step > 0.0) || !(b >= a)) throw ValidationError("beta_grid: need step > 0 and b >= a");
  const int n = static_cast<int>(std::floor((b - a) / step + 0.5));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(a + i * step);
  return out;
}

BoundaryScan boundary_scan(const MixtureSpec& base, int p, const std::vector<double>& betas, int k_max, double tol,
                           const QuadratureConfig& quad, const OptimizerOptions& opts, int jobs, double resolution) {
  if (betas.empty()) throw ValidationError("boundary_scan: empty grid");
  for (std::size_t i = 1; i < betas.size(); ++i) {
    if (!(betas[i] > betas[i - 1])) throw ValidationError("boundary_scan: grid must be increasing");
  }
  const MixtureSpec family = base.with_degenerate_allowed();
  auto at = [&](double beta, std::uint64_t label, int restarts) {
    OptimizerOptions o = opts;
    o.restarts = restarts;
    o.seed = derive_key(opts.seed, static_cast<std::uint64_t>(p), label);
    return classify(family.with_beta(p, beta), k_max, tol, quad, o);
  };
  BoundaryScan scan;
  scan.p = p;
  scan.rows = parallel_map(betas.size(), jobs, [&](std::size_t i) {
    const PhaseDiagnostics d = at(betas[i], i, opts.restarts);
    BoundaryRow row;
    row.beta = betas[i];
    row.rs_margin = d.rs_margin;
    row.is_rs = d.is_rs;
    row.indeterminate = d.indeterminate;
    row.best_dirac_q = d.best_dirac_q;
    row.l1_spread = d.l1_spread;
    row.variance_proxy = d.variance_proxy;
    row.moments = d.moments;
    const auto roots = fixed_point_oracle(family.with_beta(p, betas[i]));
    row.oracle_nontrivial = std::any_of(roots.begin(), roots.end(), [](double r) { return r > 0.0; });
    return row;
  });

  int flips = 0;
  std::size_t first = 0;
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    if (scan.rows[i].is_rs != scan.rows[i - 1].is_rs) {
      if (flips == 0) first = i;
      ++flips;
    }
  }
  scan.single_flip = flips <= 1;
  if (flips == 0) {
    scan.note = "no transition in range";
  } else {
    double lo = betas[first - 1];
    double hi = betas[first];
    const bool left = scan.rows[first - 1].is_rs;
    std::uint64_t label = 1000;
    while (hi - lo > resolution) {
      const double mid = 0.5 * (lo + hi);
      bool state = at(mid, label++, opts.restarts).is_rs;
      if (state != left) state = at(mid, label++, 2 * opts.restarts).is_rs;
      (state == left ? lo : hi) = mid;
    }
    scan.beta_c = 0.5 * (lo + hi);
    if (flips > 1) scan.note = "is_rs changes more than once along the grid";
  }

  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    if (scan.rows[i].oracle_nontrivial && !scan.rows[i - 1].oracle_nontrivial) {
      double lo = betas[i - 1];
      double hi = betas[i];
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const auto roots = fixed_point_oracle(family.with_beta(p, mid));
        const bool nontrivial = std::any_of(roots.begin(), roots.end(), [](double r) { return r > 0.0; });
        (nontrivial ? hi : lo) = mid;
      }
      scan.oracle_beta_c = 0.5 * (lo + hi);
      break;
    }
  }
  return scan;
}

}  // namespace parisi
