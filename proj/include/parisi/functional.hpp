#pragma once

#include <optional>
#include <span>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace parisi {

/// Resolution of the layered Gaussian recursion.
///
/// Every layer function is tabulated on a uniform grid in the partial sum
/// s = z_0 + ... + z_l spanning +-grid_halfwidth_sigmas * sqrt(xi'(1)).
/// Layers whose standard deviation spans a couple of grid cells are integrated
/// with a grid-aligned trapezoid rule. Narrower layers use a Gauss-Hermite rule
/// with `hermite_nodes` points whose node values come from local Lagrange
/// interpolation of degree `interpolation_order` on the grid.
struct QuadratureConfig {
  int hermite_nodes = 40;
  int grid_points = 1025;
  double grid_halfwidth_sigmas = 8.0;
  int interpolation_order = 7;

  /// Throws ValidationError unless hermite_nodes >= 8, grid_points >= 257 and odd,
  /// grid_halfwidth_sigmas >= 6, interpolation_order odd in [1, 9].
  void validate() const;

  /// Doubles the Hermite node count and halves the grid spacing.
  QuadratureConfig refined() const;

  friend bool operator==(const QuadratureConfig&, const QuadratureConfig&) = default;
};

/// P(m, beta) split into its two parts; value == e_x0 - correction.
struct FunctionalValue {
  double value = 0.0;
  double e_x0 = 0.0;
  double correction = 0.0;
  double quad_error_estimate = 0.0;
};

/// log 2, the entropy term of the finite-N free energy that P(m, beta) omits.
inline constexpr double kLog2 = 0.69314718055994530942;

/// Evaluates P(m, beta) and estimates the quadrature error against one refinement
/// level. Throws ResolutionError when the estimate exceeds `error_ceiling`.
FunctionalValue evaluate(const MixtureSpec& spec, const DiscreteMeasure& m, const QuadratureConfig& quad,
                         std::optional<double> error_ceiling = std::nullopt);

/// Same recursion on raw atom sequences (repeated locations and zero-mass atoms allowed),
/// without the refinement pass.
FunctionalValue evaluate_atoms(const MixtureSpec& spec, std::span<const double> qs, std::span<const double> ms,
                               const QuadratureConfig& quad);

/// Value only; the optimizer's objective.
double evaluate_value(const MixtureSpec& spec, std::span<const double> qs, std::span<const double> ms,
                      const QuadratureConfig& quad);

/// P(delta_q, beta) = (xi'(1) - xi'(q))/2 + E log cosh(z sqrt(xi'(q)) + h) - (theta(1) - theta(q))/2.
/// Only a one-dimensional Gaussian integral remains; it is computed with a dense
/// trapezoid rule independent of `quad`'s grid.
double rs_closed_form(const MixtureSpec& spec, double q, const QuadratureConfig& quad = {});

/// Value of the finite-N free energy normalization: P + log 2.
inline double with_entropy(double value) { return value + kLog2; }

/// f = 2 E X_0 - xi'(1), together with the difference between the rearranged form
/// xi(1)/2 + f/2 + sum_l (m_l - m_{l-1}) theta(q_l)/2 and the direct value.
struct Decomposition {
  double f_value = 0.0;
  double identity_residual = 0.0;
};
Decomposition decomposition_f(const MixtureSpec& spec, const DiscreteMeasure& m, const QuadratureConfig& quad);

/// Numerical partial derivative of P in one atom coordinate.
struct PartialDerivative {
  double value = 0.0;
  /// 0 for a central difference, +1 / -1 for a forward / backward one-sided difference
  /// (used when the central stencil would break the ordering constraints).
  int direction = 0;
  bool one_sided() const noexcept { return direction != 0; }
};

/// d P / d q_l for atom index l (0-based), Richardson-extrapolated differences with
/// steps `step` and `step`/2. Throws AdmissibilityError when neither direction is admissible.
PartialDerivative partial_q(const MixtureSpec& spec, const DiscreteMeasure& m, std::size_t l,
                            const QuadratureConfig& quad, double step = 1e-4);

/// d P / d m_l for a cumulative mass with l < k-1 (m_k = 1 is fixed).
PartialDerivative partial_m(const MixtureSpec& spec, const DiscreteMeasure& m, std::size_t l,
                            const QuadratureConfig& quad, double step = 1e-4);

}  // namespace parisi
