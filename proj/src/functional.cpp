#include "parisi/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "parisi/errors.hpp"
#include "parisi/quadrature.hpp"

namespace parisi {

void QuadratureConfig::validate() const {
  if (hermite_nodes < 8) throw ValidationError("quadrature: hermite_nodes must be >= 8");
  if (grid_points < 257) throw ValidationError("quadrature: grid_points must be >= 257");
  if (grid_points % 2 == 0) throw ValidationError("quadrature: grid_points must be odd");
  if (!(grid_halfwidth_sigmas >= 6.0)) throw ValidationError("quadrature: grid_halfwidth_sigmas must be >= 6");
  if (interpolation_order < 1 || interpolation_order > 9 || interpolation_order % 2 == 0) {
    throw ValidationError("quadrature: interpolation_order must be odd, between 1 and 9");
  }
}

QuadratureConfig QuadratureConfig::refined() const {
  QuadratureConfig r = *this;
  r.hermite_nodes = 2 * hermite_nodes;
  r.grid_points = 2 * grid_points - 1;
  return r;
}

namespace {

// A layer is integrated with the aligned trapezoid rule when its standard
// deviation covers at least this many grid cells; the aliasing error of the
// rule is then below exp(-2 pi^2 kappa^2).
constexpr double kTrapezoidMinCells = 1.6;
// Largest trapezoid step in s; layer functions are analytic in |Im s| < pi/2.
constexpr double kMaxTrapezoidStep = 0.25;
// Truncation of the standard-normal variable beyond the tilt m*sigma.
constexpr double kTailSigmas = 9.0;
// Below this mass the layer map (1/m) log E exp(m X) is replaced by its limit E X.
constexpr double kZeroMass = 1e-10;

// Quadrature for one Gaussian layer, collapsed onto grid offsets:
// E g(s_i + sigma Z) ~ sum_j weight[j] * g(s_{i + offset[j]}).
struct LayerPlan {
  bool identity = true;
  double mass = 1.0;
  std::vector<int> offset;
  std::vector<double> weight;
  int reach = 0;
};

// Lagrange basis on the points first, ..., first + order evaluated at x.
void lagrange_basis(int first, int order, double x, std::vector<double>& out) {
  out.assign(order + 1, 1.0);
  for (int a = 0; a <= order; ++a) {
    for (int b = 0; b <= order; ++b) {
      if (a != b) out[a] *= (x - (first + b)) / static_cast<double>(a - b);
    }
  }
}

LayerPlan plan_layer(double sigma, double mass, double delta, const QuadratureConfig& quad) {
  LayerPlan plan;
  plan.mass = mass;
  if (sigma <= 0.0) return plan;
  plan.identity = false;
  if (sigma >= kTrapezoidMinCells * delta) {
    const int stride = std::max(1, static_cast<int>(std::floor(std::min(sigma / kTrapezoidMinCells,
                                                                          kMaxTrapezoidStep) / delta)));
    const double dz = stride * delta / sigma;
    const int half = static_cast<int>(std::ceil((kTailSigmas + sigma) / dz));
    double total = 0.0;
    for (int j = -half; j <= half; ++j) {
      const double z = j * dz;
      plan.offset.push_back(j * stride);
      plan.weight.push_back(std::exp(-0.5 * z * z));
      total += plan.weight.back();
    }
    for (double& w : plan.weight) w /= total;
    plan.reach = half * stride;
    return plan;
  }
  // Narrow layer: Gauss-Hermite nodes sigma*x_n fall between grid points; each
  // node value comes from the local Lagrange interpolant of the given order, so
  // the whole rule is a fixed stencil on the grid.
  const auto rule = gauss_hermite(quad.hermite_nodes);
  const int order = quad.interpolation_order;
  const int left = (order - 1) / 2;
  double max_offset = 0.0;
  for (double x : rule->nodes) max_offset = std::max(max_offset, std::abs(sigma * x / delta));
  const int span = static_cast<int>(std::ceil(max_offset)) + order + 1;
  std::vector<double> stencil(2 * span + 1, 0.0);
  std::vector<double> basis;
  for (std::size_t n = 0; n < rule->nodes.size(); ++n) {
    const double x = sigma * rule->nodes[n] / delta;
    const int cell = static_cast<int>(std::floor(x));
    const int first = cell - left;
    lagrange_basis(first, order, x, basis);
    for (int a = 0; a <= order; ++a) stencil[first + a + span] += rule->weights[n] * basis[a];
  }
  const double total = std::accumulate(stencil.begin(), stencil.end(), 0.0);
  for (int j = -span; j <= span; ++j) {
    if (stencil[j + span] != 0.0) {
      plan.offset.push_back(j);
      plan.weight.push_back(stencil[j + span] / total);
      plan.reach = std::max(plan.reach, std::abs(j));
    }
  }
  return plan;
}

// Grid function with the linear (slope +-1) asymptote of log cosh beyond the grid.
class GridFunction {
 public:
  GridFunction(int points, int pad, double delta)
      : points_(points), pad_(pad), delta_(delta), values_(points + 2 * pad) {}

  double& at(int i) { return values_[i + pad_]; }
  double at(int i) const { return values_[i + pad_]; }

  // Fills the padding beyond the grid edges touched by [lo, hi].
  void extend(int lo, int hi) {
    if (lo == 0) {
      const double edge = at(0);
      for (int i = 1; i <= pad_; ++i) at(-i) = edge + i * delta_;
    }
    if (hi == points_ - 1) {
      const double edge = at(points_ - 1);
      for (int i = 1; i <= pad_; ++i) at(points_ - 1 + i) = edge + i * delta_;
    }
  }

 private:
  int points_;
  int pad_;
  double delta_;
  std::vector<double> values_;
};

// Masses below this use per-term expm1 so that log(1 + x)/m keeps full precision.
constexpr double kSmallMass = 0.05;
// Largest exponent range m * (max F - min F) handled with a single global shift.
constexpr double kMaxExponentRange = 600.0;

// Writes (1/m) log E exp(m F(s_i + sigma Z)) for i in [lo, hi] into `out`
// (E F(s_i + sigma Z) when m ~ 0). F is read on [lo - reach, hi + reach].
void apply_layer(const LayerPlan& plan, const GridFunction& f, int lo, int hi, GridFunction& out,
                 std::vector<double>& scratch) {
  const std::size_t n = plan.weight.size();
  const int* off = plan.offset.data();
  const double* w = plan.weight.data();
  const double m = plan.mass;
  if (m <= kZeroMass) {
    for (int i = lo; i <= hi; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += w[j] * f.at(i + off[j]);
      out.at(i) = s;
    }
    return;
  }
  const int first = lo - plan.reach;
  const int last = hi + plan.reach;
  double fmax = -INFINITY;
  double fmin = INFINITY;
  for (int i = first; i <= last; ++i) {
    fmax = std::max(fmax, f.at(i));
    fmin = std::min(fmin, f.at(i));
  }
  if (m >= kSmallMass && m * (fmax - fmin) <= kMaxExponentRange) {
    scratch.resize(last - first + 1);
    for (int i = first; i <= last; ++i) scratch[i - first] = std::exp(m * (f.at(i) - fmax));
    const double* e = scratch.data() - first;
    for (int i = lo; i <= hi; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += w[j] * e[i + off[j]];
      out.at(i) = fmax + std::log(s) / m;
    }
    return;
  }
  // Shift by the center value F(s_i); F is 1-Lipschitz so the exponents stay bounded.
  for (int i = lo; i <= hi; ++i) {
    const double center = f.at(i);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w[j] * std::expm1(m * (f.at(i + off[j]) - center));
    out.at(i) = center + std::log1p(s) / m;
  }
}

// E X_0 for raw, validated atoms.
double expected_x0(const MixtureSpec& spec, std::span<const double> qs, std::span<const double> ms,
                   const QuadratureConfig& quad) {
  const std::size_t k = qs.size();
  const double total_variance = xi_prime(spec, 1.0);
  // Layer standard deviations: z_0 carries xi'(q_1) (the p = 1 field variance included),
  // z_l carries xi'(q_{l+1}) - xi'(q_l).
  std::vector<double> sigma(k + 1);
  double prev = 0.0;
  for (std::size_t l = 0; l <= k; ++l) {
    const double next = (l < k) ? xi_prime(spec, qs[l]) : total_variance;
    sigma[l] = std::sqrt(std::max(0.0, next - prev));
    prev = std::max(prev, next);
  }

  const int points = quad.grid_points;
  const int center = (points - 1) / 2;
  const double halfwidth = quad.grid_halfwidth_sigmas * (total_variance > 0.0 ? std::sqrt(total_variance) : 1.0);
  const double delta = 2.0 * halfwidth / (points - 1);

  // plans[0] integrates z_0 at s = 0; plans[l] (1 <= l <= k-1) maps F_l to F_{l-1}.
  // The top layer z_k (mass m_k = 1) has the closed form
  // F_{k-1}(s) = log cosh(s + h) + sigma_k^2 / 2.
  std::vector<LayerPlan> plans;
  plans.reserve(k);
  plans.push_back(plan_layer(sigma[0], 0.0, delta, quad));
  for (std::size_t l = 1; l < k; ++l) plans.push_back(plan_layer(sigma[l], ms[l - 1], delta, quad));

  // Index ranges on which each F_l is needed.
  std::vector<int> lo(k), hi(k);
  int reach = plans[0].reach;
  lo[0] = std::max(0, center - reach);
  hi[0] = std::min(points - 1, center + reach);
  for (std::size_t l = 1; l < k; ++l) {
    reach += plans[l].reach;
    lo[l] = std::max(0, center - reach);
    hi[l] = std::min(points - 1, center + reach);
  }
  const int pad = reach + 1;

  GridFunction current(points, pad, delta);
  GridFunction next(points, pad, delta);
  const double h = spec.h();
  const double top_shift = 0.5 * sigma[k] * sigma[k];
  {
    const std::size_t l = k - 1;
    for (int i = lo[l]; i <= hi[l]; ++i) current.at(i) = log_cosh((i - center) * delta + h) + top_shift;
    current.extend(lo[l], hi[l]);
  }
  std::vector<double> scratch;
  for (std::size_t l = k - 1; l >= 1; --l) {
    const LayerPlan& plan = plans[l];
    if (plan.identity) {
      for (int i = lo[l - 1]; i <= hi[l - 1]; ++i) next.at(i) = current.at(i);
    } else {
      apply_layer(plan, current, lo[l - 1], hi[l - 1], next, scratch);
    }
    next.extend(lo[l - 1], hi[l - 1]);
    std::swap(current, next);
  }
  if (plans[0].identity) return current.at(center);
  double s = 0.0;
  for (std::size_t j = 0; j < plans[0].weight.size(); ++j) s += plans[0].weight[j] * current.at(center + plans[0].offset[j]);
  return s;
}

double correction_term(const MixtureSpec& spec, std::span<const double> qs, std::span<const double> ms) {
  double s = 0.0;
  const std::size_t k = qs.size();
  for (std::size_t l = 0; l < k; ++l) {
    const double upper = (l + 1 < k) ? qs[l + 1] : 1.0;
    s += ms[l] * (theta(spec, upper) - theta(spec, qs[l]));
  }
  return 0.5 * s;
}

}  // namespace

FunctionalValue evaluate_atoms(const MixtureSpec& spec, std::span<const double> qs, std::span<const double> ms,
                               const QuadratureConfig& quad) {
  quad.validate();
  validate_atoms(qs, ms);
  std::vector<double> mass(ms.begin(), ms.end());
  mass.back() = 1.0;
  FunctionalValue out;
  out.e_x0 = expected_x0(spec, qs, mass, quad);
  out.correction = correction_term(spec, qs, mass);
  out.value = out.e_x0 - out.correction;
  return out;
}

double evaluate_value(const MixtureSpec& spec, std::span<const double> qs, std::span<const double> ms,
                      const QuadratureConfig& quad) {
  return evaluate_atoms(spec, qs, ms, quad).value;
}

FunctionalValue evaluate(const MixtureSpec& spec, const DiscreteMeasure& m, const QuadratureConfig& quad,
                         std::optional<double> error_ceiling) {
  FunctionalValue out = evaluate_atoms(spec, m.q(), m.m(), quad);
  const double fine = evaluate_atoms(spec, m.q(), m.m(), quad.refined()).value;
  out.quad_error_estimate = std::abs(fine - out.value);
  if (error_ceiling && out.quad_error_estimate > *error_ceiling) {
    throw ResolutionError("evaluate: quadrature error estimate exceeds the ceiling", out.quad_error_estimate);
  }
  return out;
}

double rs_closed_form(const MixtureSpec& spec, double q, const QuadratureConfig&) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("rs_closed_form: q outside [0,1]");
  const double inner = xi_prime(spec, q);
  const double tail = 0.5 * (xi_prime(spec, 1.0) - inner);
  const double field = gaussian_expectation(log_cosh, spec.h(), std::sqrt(inner));
  return tail + field - 0.5 * (theta(spec, 1.0) - theta(spec, q));
}

Decomposition decomposition_f(const MixtureSpec& spec, const DiscreteMeasure& m, const QuadratureConfig& quad) {
  const FunctionalValue direct = evaluate_atoms(spec, m.q(), m.m(), quad);
  Decomposition d;
  d.f_value = 2.0 * direct.e_x0 - xi_prime(spec, 1.0);
  double rearranged = 0.5 * xi(spec, 1.0) + 0.5 * d.f_value;
  for (std::size_t l = 0; l < m.size(); ++l) rearranged += 0.5 * m.jump(l) * theta(spec, m.q()[l]);
  d.identity_residual = rearranged - direct.value;
  return d;
}

namespace {

// Shared finite-difference driver: `coords` is the perturbed coordinate vector
// (either q or m) and [lower, upper] its admissible interval.
template <typename Eval>
PartialDerivative perturb(Eval&& eval, double x, double lower, double upper, double step) {
  if (!(step > 0.0)) throw ValidationError("partial derivative: step must be positive");
  PartialDerivative out;
  if (x - step >= lower && x + step <= upper) {
    const double f1 = (eval(x + step) - eval(x - step)) / (2.0 * step);
    const double f2 = (eval(x + 0.5 * step) - eval(x - 0.5 * step)) / step;
    out.value = (4.0 * f2 - f1) / 3.0;
    return out;
  }
  int dir = 0;
  if (x + step <= upper) {
    dir = 1;
  } else if (x - step >= lower) {
    dir = -1;
  } else {
    throw AdmissibilityError("partial derivative: no admissible perturbation direction");
  }
  const double f0 = eval(x);
  const double d1 = (eval(x + dir * step) - f0) / (dir * step);
  const double d2 = (eval(x + dir * 0.5 * step) - f0) / (dir * 0.5 * step);
  out.value = 2.0 * d2 - d1;
  out.direction = dir;
  return out;
}

}  // namespace

PartialDerivative partial_q(const MixtureSpec& spec, const DiscreteMeasure& m, std::size_t l,
                            const QuadratureConfig& quad, double step) {
  if (l >= m.size()) throw ValidationError("partial_q: atom index out of range");
  std::vector<double> qs(m.q().begin(), m.q().end());
  const std::vector<double> ms(m.m().begin(), m.m().end());
  const double lower = l == 0 ? 0.0 : qs[l - 1];
  const double upper = l + 1 == qs.size() ? 1.0 : qs[l + 1];
  auto eval = [&](double x) {
    qs[l] = x;
    return evaluate_value(spec, qs, ms, quad);
  };
  return perturb(eval, m.q()[l], lower, upper, step);
}

PartialDerivative partial_m(const MixtureSpec& spec, const DiscreteMeasure& m, std::size_t l,
                            const QuadratureConfig& quad, double step) {
  if (l + 1 >= m.size()) throw ValidationError("partial_m: the last cumulative mass is fixed at 1");
  const std::vector<double> qs(m.q().begin(), m.q().end());
  std::vector<double> ms(m.m().begin(), m.m().end());
  const double lower = l == 0 ? 0.0 : ms[l - 1];
  const double upper = ms[l + 1];
  auto eval = [&](double x) {
    ms[l] = x;
    return evaluate_value(spec, qs, ms, quad);
  };
  return perturb(eval, m.m()[l], lower, upper, step);
}

}  // namespace parisi
