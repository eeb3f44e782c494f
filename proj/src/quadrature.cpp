#include "parisi/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "parisi/errors.hpp"

namespace parisi {

namespace {

GaussHermiteRule build_rule(int n) {
  // Jacobi matrix of the probabilists' Hermite recurrence: zero diagonal,
  // off-diagonal sqrt(k).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    rule.nodes[j] = solver.eigenvalues()[j];
    const double v = solver.eigenvectors()(0, j);
    rule.weights[j] = v * v;
    total += rule.weights[j];
  }
  for (double& w : rule.weights) w /= total;
  // Symmetrize: the exact rule is symmetric about zero.
  for (int j = 0; j < n / 2; ++j) {
    const double x = 0.5 * (rule.nodes[n - 1 - j] - rule.nodes[j]);
    const double w = 0.5 * (rule.weights[n - 1 - j] + rule.weights[j]);
    rule.nodes[j] = -x;
    rule.nodes[n - 1 - j] = x;
    rule.weights[j] = w;
    rule.weights[n - 1 - j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

std::shared_ptr<const GaussHermiteRule> gauss_hermite(int n) {
  if (n < 1) throw ValidationError("gauss_hermite: need at least one node");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const GaussHermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const GaussHermiteRule>(build_rule(n));
  return slot;
}

double gaussian_expectation(const std::function<double(double)>& f, double mean, double sigma) {
  if (sigma == 0.0) return f(mean);
  constexpr double kZMax = 12.0;
  const double dz = std::min(0.1, 0.2 / std::abs(sigma));
  const int half = static_cast<int>(std::ceil(kZMax / dz));
  double sum = 0.0;
  double norm = 0.0;
  // Pair +z and -z so that symmetric integrands stay symmetric under rounding.
  for (int j = half; j >= 1; --j) {
    const double z = j * dz;
    const double w = std::exp(-0.5 * z * z);
    sum += w * (f(mean + sigma * z) + f(mean - sigma * z));
    norm += 2.0 * w;
  }
  sum += f(mean);
  norm += 1.0;
  return sum / norm;
}

}  // namespace parisi
