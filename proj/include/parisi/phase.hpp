#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parisi/functional.hpp"
#include "parisi/mixture.hpp"
#include "parisi/optimizer.hpp"

namespace parisi {

struct DiracOptimum {
  double q = 0.0;
  double value = 0.0;
};

/// Minimizes rs_closed_form over a 1001-point grid in [0,1], then refines around
/// the best grid point by golden-section search. Ties go to the smallest q.
DiracOptimum rs_best_dirac(const MixtureSpec& spec, const QuadratureConfig& quad = {});

/// q - E tanh^2(z sqrt(xi'(q)) + h), with a 200-node Gauss-Hermite rule.
double fixed_point_residual(const MixtureSpec& spec, double q);

/// Roots in [0,1] of q = E tanh^2(z sqrt(xi'(q)) + h): sign scan over 2001 points
/// plus geometric points down to 1e-10,
/// exact zeros kept, each sign change refined by bisection. Sorted ascending.
std::vector<double> fixed_point_oracle(const MixtureSpec& spec);

struct PhaseDiagnostics {
  double best_dirac_q = 0.0;
  double best_dirac_value = 0.0;
  /// Value the ladder is compared against: P(delta_0) for spin-flip symmetric
  /// specs, the best Dirac value otherwise.
  double rs_reference_value = 0.0;
  std::string rs_reference;  // "delta_0" or "best_dirac"
  double ladder_value = 0.0;
  double rs_margin = 0.0;
  bool is_rs = true;
  /// rs_margin within a factor 4 of tol on either side.
  bool indeterminate = false;
  double l1_spread = 0.0;
  /// (p1, p2) -> (int q^p1 dm)^(1/p1) - (int q^p2 dm)^(1/p2) for active p1 < p2.
  std::map<std::pair<int, int>, double> moment_gap;
  /// int q^p dm for each p listed in the spec (including zero coefficients).
  std::map<int, double> moments;
  double variance_proxy = 0.0;
  /// Same quantity as int (q - mean)^2 dm; equals variance_proxy up to rounding.
  double variance_direct = 0.0;
  /// Outside RS at h = 0: int q^p dm > 0 for every even active p.
  bool symmetric_witness = false;
  /// Outside RS with two even active p: some moment_gap < 0 and variance_proxy > 0.
  bool spread_witness = false;
  /// Pure 2-spin (plus field) with h != 0: the non-self-averaging conclusion is
  /// not established for this case.
  bool conjectural = false;
  DiscreteMeasure measure = DiscreteMeasure::dirac(0.0);
  LadderReport ladder;
};

PhaseDiagnostics classify(const MixtureSpec& spec, int k_max, double tol, const QuadratureConfig& quad,
                          const OptimizerOptions& opts);

struct BoundaryRow {
  double beta = 0.0;
  double rs_margin = 0.0;
  bool is_rs = true;
  bool indeterminate = false;
  double best_dirac_q = 0.0;
  double l1_spread = 0.0;
  double variance_proxy = 0.0;
  std::map<int, double> moments;
  bool oracle_nontrivial = false;
};

struct BoundaryScan {
  int p = 2;
  std::vector<BoundaryRow> rows;
  /// First flip of is_rs along the grid, refined by bisection; empty when none.
  std::optional<double> beta_c;
  /// Where fixed_point_oracle first has a root other than 0 (bisection to 1e-6);
  /// meaningful for spin-flip symmetric families.
  std::optional<double> oracle_beta_c;
  /// is_rs changes at most once along the grid.
  bool single_flip = true;
  std::string note;
};

/// Sweeps beta_p over `betas` (monotone) with classify at each point, then bisects
/// the first flip to `resolution`. Midpoints that disagree with the left end are
/// re-run with doubled restarts before being accepted. Grid points run on up to
/// `jobs` threads.
BoundaryScan boundary_scan(const MixtureSpec& base, int p, const std::vector<double>& betas, int k_max, double tol,
                           const QuadratureConfig& quad, const OptimizerOptions& opts, int jobs = 1,
                           double resolution = 1e-3);

/// Grid a, a + step, ... up to b (inclusive within half a step).
std::vector<double> beta_grid(double a, double b, double step);

}  // namespace parisi
