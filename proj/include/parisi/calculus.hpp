#pragma once

#include <string>
#include <vector>

#include "parisi/functional.hpp"
#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"
#include "parisi/optimizer.hpp"

namespace parisi {

/// beta_p (1 - int q^p dm). The identity is proved only at constrained
/// minimizers; elsewhere the number is just the formula evaluated at m.
struct BetaDerivative {
  double value = 0.0;
  /// False when p has no term in the spec (beta_p = 0, so the value is 0).
  bool term_present = true;
  static constexpr const char* kLabel = "at-minimizer formula";
};
BetaDerivative dP_dbeta_analytic(const MixtureSpec& spec, const DiscreteMeasure& m, int p);

/// d/d beta_p P(m, beta) at fixed m: central differences with steps `step` and
/// `step`/2 combined by Richardson extrapolation. The layer variances follow the
/// perturbed xi'.
double dP_dbeta_fd(const MixtureSpec& spec, const DiscreteMeasure& m, int p, double step, const QuadratureConfig& quad);

/// P(m, beta) with beta_p replaced by `beta`.
double value_at_beta(const MixtureSpec& spec, const DiscreteMeasure& m, int p, double beta,
                     const QuadratureConfig& quad);

struct SubdifferentialProbe {
  int p = 2;
  double beta_value = 0.0;
  int k = 1;
  /// Gap estimate for the top level: value(k_max - 1) - value(k_max).
  double eps_k = 0.0;
  double y = 0.0;
  /// |d^2/d beta_p^2 P(m^k, beta)| from a 5-point stencil at frozen m^k.
  double curvature = 0.0;
  /// Envelope values at beta - y, beta, beta + y (fresh minimizations at level k).
  double value_minus = 0.0;
  double value_center = 0.0;
  double value_plus = 0.0;
  double lower = 0.0;  // (value_center - value_minus) / y
  double upper = 0.0;  // (value_plus - value_center) / y
  double analytic = 0.0;
  /// C y + eps_k / y.
  double slack = 0.0;
  /// analytic in [lower - slack, upper + slack].
  bool contained = false;
  /// Tight chain: analytic in [upper - slack, lower + slack] (upper and lower
  /// swap roles because they bound the same derivative from both sides).
  bool tight_contained = false;
  /// One analytic value and containment flag per tied minimizer of the top level.
  std::vector<double> candidate_analytic;
  std::vector<bool> candidate_contained;
};

/// Subgradient sandwich at the top ladder level k with y = max(sqrt(eps_k), y_min).
/// Requires a ladder with at least two levels.
SubdifferentialProbe subdifferential_probe(const MixtureSpec& spec, int p, const LadderReport& ladder,
                                           const QuadratureConfig& quad, const OptimizerOptions& opts,
                                           double y_min = 1e-4);

struct MomentPrediction {
  int p = 2;
  double value = 0.0;
  /// beta_p = 0: the derivative identity carries no information about this moment.
  bool outside_guarantee = false;
};
/// int q^p dm for the top ladder minimizer: the predicted limit of E<R^p>.
MomentPrediction overlap_moment_limit(const MixtureSpec& spec, const LadderReport& ladder, int p);

/// k-level envelope min_m P(m, beta) along a beta_p grid, also evaluated at -beta_p.
struct EnvelopeScan {
  int p = 2;
  std::vector<double> betas;
  std::vector<double> values;
  std::vector<double> mirrored;
  /// Smallest second difference v[i-1] - 2 v[i] + v[i+1].
  double min_second_difference = 0.0;
  /// Largest |value(beta) - value(-beta)|.
  double max_asymmetry = 0.0;
};
/// Each grid point is an independent minimize_k run warm-started from `warm`;
/// points run on up to `jobs` threads.
EnvelopeScan envelope_scan(const MixtureSpec& spec, int p, const std::vector<double>& betas, int k,
                           const OptimizerOptions& opts, const QuadratureConfig& quad,
                           const std::vector<DiscreteMeasure>& warm, int jobs = 1);

}  // namespace parisi
