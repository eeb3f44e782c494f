#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

namespace parisi {

/// Gauss-Hermite rule for E f(Z), Z ~ N(0,1): sum_j weights[j] * f(nodes[j]).
/// Weights sum to one.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule with n nodes (Golub-Welsch). Rules are cached and shared across threads.
std::shared_ptr<const GaussHermiteRule> gauss_hermite(int n);

/// E f(mean + sigma Z) by the trapezoid rule in z, with step small enough that
/// integrands analytic in the strip |Im| < pi/2 (log cosh, tanh^2) are resolved
/// to near machine precision.
double gaussian_expectation(const std::function<double(double)>& f, double mean, double sigma);

/// log cosh(x) without overflow.
inline double log_cosh(double x) {
  const double a = x < 0 ? -x : x;
  return a + std::log1p(std::exp(-2.0 * a)) - 0.69314718055994530942;
}

}  // namespace parisi
