#include "parisi/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/parallel.hpp"
#include "parisi/rng.hpp"

namespace parisi {

BetaDerivative dP_dbeta_analytic(const MixtureSpec& spec, const DiscreteMeasure& m, int p) {
  if (p < 1) throw ValidationError("dP_dbeta: p must be >= 1");
  BetaDerivative d;
  d.term_present = spec.has_term(p);
  d.value = spec.beta(p) * (1.0 - moment(m, p));
  return d;
}

double value_at_beta(const MixtureSpec& spec, const DiscreteMeasure& m, int p, double beta,
                     const QuadratureConfig& quad) {
  const MixtureSpec moved = spec.with_degenerate_allowed().with_beta(p, beta);
  return evaluate_value(moved, m.q(), m.m(), quad);
}

double dP_dbeta_fd(const MixtureSpec& spec, const DiscreteMeasure& m, int p, double step, const QuadratureConfig& quad) {
  if (!(step > 0.0)) throw ValidationError("dP_dbeta_fd: step must be positive");
  const double b = spec.beta(p);
  auto central = [&](double h) {
    return (value_at_beta(spec, m, p, b + h, quad) - value_at_beta(spec, m, p, b - h, quad)) / (2.0 * h);
  };
  const double d1 = central(step);
  const double d2 = central(0.5 * step);
  return (4.0 * d2 - d1) / 3.0;
}

namespace {

double envelope_value(const MixtureSpec& spec, int p, double beta, int k, const OptimizerOptions& opts,
                      const QuadratureConfig& quad, const std::vector<DiscreteMeasure>& warm) {
  const MixtureSpec moved = spec.with_degenerate_allowed().with_beta(p, beta);
  return minimize_k(moved, k, opts, quad, warm).value.value;
}

}  // namespace

SubdifferentialProbe subdifferential_probe(const MixtureSpec& spec, int p, const LadderReport& ladder,
                                           const QuadratureConfig& quad, const OptimizerOptions& opts,
                                           double y_min) {
  if (ladder.levels.size() < 2) throw ValidationError("subdifferential_probe: ladder needs k_max >= 2");
  if (!(y_min > 0.0)) throw ValidationError("subdifferential_probe: y_min must be positive");
  const LadderLevel& top = ladder.top();
  const LadderLevel& below = ladder.levels[ladder.levels.size() - 2];
  SubdifferentialProbe pr;
  pr.p = p;
  pr.beta_value = spec.beta(p);
  pr.k = top.k;
  pr.eps_k = std::max(0.0, below.value - top.value);
  pr.y = std::max(std::sqrt(pr.eps_k), y_min);

  constexpr double kStencil = 1e-2;
  const double b = pr.beta_value;
  const double f0 = value_at_beta(spec, top.measure, p, b, quad);
  const double fp1 = value_at_beta(spec, top.measure, p, b + kStencil, quad);
  const double fm1 = value_at_beta(spec, top.measure, p, b - kStencil, quad);
  const double fp2 = value_at_beta(spec, top.measure, p, b + 2 * kStencil, quad);
  const double fm2 = value_at_beta(spec, top.measure, p, b - 2 * kStencil, quad);
  pr.curvature = std::abs((-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * kStencil * kStencil));

  std::vector<DiscreteMeasure> warm{top.measure};
  warm.insert(warm.end(), top.alternatives.begin(), top.alternatives.end());
  OptimizerOptions side = opts;
  side.seed = derive_key(opts.seed, static_cast<std::uint64_t>(p), 1);
  pr.value_plus = envelope_value(spec, p, b + pr.y, top.k, side, quad, warm);
  side.seed = derive_key(opts.seed, static_cast<std::uint64_t>(p), 2);
  pr.value_minus = envelope_value(spec, p, b - pr.y, top.k, side, quad, warm);
  pr.value_center = top.value;
  pr.upper = (pr.value_plus - pr.value_center) / pr.y;
  pr.lower = (pr.value_center - pr.value_minus) / pr.y;
  pr.slack = pr.curvature * pr.y + pr.eps_k / pr.y;
  pr.analytic = dP_dbeta_analytic(spec, top.measure, p).value;
  pr.contained = pr.analytic >= pr.lower - pr.slack && pr.analytic <= pr.upper + pr.slack;
  pr.tight_contained = pr.analytic >= pr.upper - pr.slack && pr.analytic <= pr.lower + pr.slack;
  std::vector<DiscreteMeasure> all{top.measure};
  all.insert(all.end(), top.alternatives.begin(), top.alternatives.end());
  for (const DiscreteMeasure& m : all) {
    const double a = dP_dbeta_analytic(spec, m, p).value;
    pr.candidate_analytic.push_back(a);
    pr.candidate_contained.push_back(a >= pr.lower - pr.slack && a <= pr.upper + pr.slack);
  }
  return pr;
}

MomentPrediction overlap_moment_limit(const MixtureSpec& spec, const LadderReport& ladder, int p) {
  if (p < 1) throw ValidationError("overlap_moment_limit: p must be >= 1");
  if (ladder.levels.empty()) throw ValidationError("overlap_moment_limit: empty ladder");
  MomentPrediction mp;
  mp.p = p;
  mp.value = moment(ladder.top().measure, p);
  mp.outside_guarantee = spec.beta(p) == 0.0;
  return mp;
}

EnvelopeScan envelope_scan(const MixtureSpec& spec, int p, const std::vector<double>& betas, int k,
                           const OptimizerOptions& opts, const QuadratureConfig& quad,
                           const std::vector<DiscreteMeasure>& warm, int jobs) {
  if (betas.size() < 3) throw ValidationError("envelope_scan: at least 3 grid points");
  EnvelopeScan es;
  es.p = p;
  es.betas = betas;
  const std::size_t n = betas.size();
  // Tasks 0..n-1 at +beta, n..2n-1 at -beta; the seed depends only on the grid index.
  const auto vals = parallel_map(2 * n, jobs, [&](std::size_t t) {
    const std::size_t i = t % n;
    const double beta = t < n ? betas[i] : -betas[i];
    OptimizerOptions o = opts;
    o.seed = derive_key(opts.seed, static_cast<std::uint64_t>(p), 3, i);
    return envelope_value(spec, p, beta, k, o, quad, warm);
  });
  es.values.assign(vals.begin(), vals.begin() + n);
  es.mirrored.assign(vals.begin() + n, vals.end());
  es.min_second_difference = INFINITY;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    es.min_second_difference =
        std::min(es.min_second_difference, es.values[i - 1] - 2.0 * es.values[i] + es.values[i + 1]);
  }
  for (std::size_t i = 0; i < n; ++i) es.max_asymmetry = std::max(es.max_asymmetry, std::abs(es.values[i] - es.mirrored[i]));
  return es;
}

}  // namespace parisi
