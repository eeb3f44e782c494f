#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "parisi/functional.hpp"
#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace parisi {

enum class SearchStrategy { simplex, gradient };

struct OptimizerOptions {
  int restarts = 8;
  /// Iteration cap for each local search (simplex iterations or gradient steps).
  int max_iters = 2000;
  /// The quasi-Newton polish stops after two steps improving the value by less
  /// than this; the simplex stage stops at max(value_tol, 1e-10).
  double value_tol = 1e-15;
  double stationarity_tol = 1e-3;
  std::uint64_t seed = 1;
  SearchStrategy strategy = SearchStrategy::simplex;
  /// Absolute value window inside which distinct minimizers count as ties.
  double tie_tol = 1e-10;

  /// Throws ValidationError unless restarts >= 1, max_iters >= 1 and the tolerances are positive.
  void validate() const;
};

/// One coordinate residual of the stationarity certificate.
struct AtomResidual {
  std::size_t index = 0;
  char coordinate = 'q';  // 'q' (location) or 'm' (cumulative mass)
  double value = 0.0;     // partial derivative (one-sided when direction != 0)
  int direction = 0;
  /// The coordinate sits on an active constraint (q_1 = 0 or q_k = 1).
  bool boundary = false;
  /// For boundary coordinates: value difference quotient over a finite step into
  /// the feasible set, which catches descent directions with vanishing slope.
  double finite_quotient = 0.0;
  bool ok = true;
};

struct StationarityReport {
  std::vector<AtomResidual> residuals;
  double max_interior_residual = 0.0;
  bool pass = true;
};

/// Per-atom partial derivatives; PASS iff every interior residual is <= tol in
/// absolute value and every boundary coordinate admits no descent (one-sided slope
/// and finite quotient both >= -tol).
StationarityReport stationarity_certificate(const MixtureSpec& spec, const DiscreteMeasure& m,
                                            const QuadratureConfig& quad, double tol);

struct MinimizeResult {
  DiscreteMeasure measure = DiscreteMeasure::dirac(0.0);
  FunctionalValue value;
  /// False when some local search exhausted its iteration cap.
  bool converged = true;
  long evaluations = 0;
  StationarityReport certificate;
  /// Other candidates within the tie window whose atoms differ from `measure`.
  std::vector<DiscreteMeasure> alternatives;
};

/// Minimizes P(m, beta) over measures with at most k atoms by multistart local
/// search. Starts: the best Dirac from a coarse scan, `warm_starts`, random
/// feasible draws up to opts.restarts, and for k >= 2 the best two-atom measure
/// from a coarse grid. The best Dirac, the two-atom measure and the warm starts
/// also compete as candidates unchanged, so the result is never worse than any of them.
MinimizeResult minimize_k(const MixtureSpec& spec, int k, const OptimizerOptions& opts, const QuadratureConfig& quad,
                          const std::vector<DiscreteMeasure>& warm_starts = {});

struct LadderLevel {
  int k = 1;
  DiscreteMeasure measure = DiscreteMeasure::dirac(0.0);
  double value = 0.0;
  double stationarity_max_residual = 0.0;
  bool certified = true;
  bool converged = true;
  std::vector<DiscreteMeasure> alternatives;
};

struct LadderReport {
  std::vector<LadderLevel> levels;
  /// eps[i] = value(k_i) - value(k_max): computable stand-in for the unknown gap to P(beta).
  std::vector<double> eps;

  bool converged() const;
  const LadderLevel& top() const { return levels.back(); }
};

/// Atom l replaced by two atoms slightly below and above it, each with half its mass.
/// Atoms at 0 or 1 keep one half in place.
DiscreteMeasure split_atom(const DiscreteMeasure& m, std::size_t l);

/// minimize_k for k = 1..k_max. Level k+1 is warm-started from the level-k
/// minimizer with one atom inserted (see insert_atoms) and from each single-atom
/// split of it (see split_atom); the
/// level-k minimizer itself is a candidate, so values never increase with k.
LadderReport minimize_ladder(const MixtureSpec& spec, int k_max, const OptimizerOptions& opts,
                             const QuadratureConfig& quad, const std::vector<DiscreteMeasure>& warm_starts = {});

/// Warm start for k atoms built from a smaller measure: each new atom goes to the
/// midpoint of the largest q-gap (including the gaps to 0 and 1) and takes half of
/// the jump of the neighbouring atom above it (below it, past the last atom).
/// Returns raw (q, m) sequences; the result may repeat a location when k exceeds
/// what the gaps can separate.
std::pair<std::vector<double>, std::vector<double>> insert_atoms(const DiscreteMeasure& m, int k);

/// Diagnostic only: P(lambda m1 + (1 - lambda) m2) along a lambda grid and the
/// largest violation of midpoint convexity.
struct ConvexityProbe {
  std::vector<double> lambdas;
  std::vector<double> values;
  double max_violation = 0.0;
};
ConvexityProbe convexity_probe(const MixtureSpec& spec, const DiscreteMeasure& m1, const DiscreteMeasure& m2,
                               const QuadratureConfig& quad, int points = 11);

std::string to_string(SearchStrategy s);
SearchStrategy parse_strategy(const std::string& s);

}  // namespace parisi
