#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "parisi/quadrature.hpp"

using namespace parisi;

TEST_CASE("Gauss-Hermite rule matches Newton-iterated roots") {
  for (int n : {8, 20, 40, 80}) {
    const auto rule = gauss_hermite(n);
    const auto ref = oracle::hermite(n);
    REQUIRE(ref.x.size() == static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(rule->nodes[i] - ref.x[i]) < 1e-11 * (1.0 + std::abs(ref.x[i])));
      CHECK(std::abs(rule->weights[i] - ref.w[i]) < 1e-12);
    }
  }
}

TEST_CASE("Gauss-Hermite integrates Gaussian moments exactly") {
  const auto rule = gauss_hermite(40);
  double dfact = 1.0;
  for (int j = 0; j <= 15; ++j) {
    double even = 0.0, odd = 0.0;
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
      even += rule->weights[i] * std::pow(rule->nodes[i], 2 * j);
      odd += rule->weights[i] * std::pow(rule->nodes[i], 2 * j + 1);
    }
    CHECK(std::abs(even - dfact) <= 1e-11 * dfact);
    CHECK(std::abs(odd) <= 1e-11 * dfact);
    dfact *= 2 * j + 1;
  }
}

TEST_CASE("dense Gaussian expectation") {
  for (double sigma : {0.1, 1.0, 2.5}) {
    for (double mean : {0.0, 0.7}) {
      const double v = gaussian_expectation([](double x) { return std::cosh(x); }, mean, sigma);
      CHECK(std::abs(v - std::exp(0.5 * sigma * sigma) * std::cosh(mean)) < 1e-12 * v);
    }
  }
  CHECK(gaussian_expectation([](double x) { return x * x; }, 0.0, 0.0) == 0.0);
  CHECK(std::abs(log_cosh(800.0) - (800.0 - std::log(2.0))) < 1e-12);
  CHECK(std::abs(log_cosh(0.3) - std::log(std::cosh(0.3))) < 1e-16);
}
