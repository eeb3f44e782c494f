#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "parisi/errors.hpp"
#include "parisi/measure.hpp"

using namespace parisi;

namespace {

DiscreteMeasure random_measure(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> q(k), m(k);
  for (auto& v : q) v = u(rng);
  for (auto& v : m) v = u(rng);
  std::sort(q.begin(), q.end());
  std::sort(m.begin(), m.end());
  m.back() = 1.0;
  return DiscreteMeasure::make(q, m);
}

}  // namespace

TEST_CASE("make canonicalizes and validates") {
  const std::vector<double> q0{0.0}, m1{1.0};
  const auto d0 = DiscreteMeasure::make(q0, m1);
  CHECK(d0 == DiscreteMeasure::dirac(0.0));
  const std::vector<double> qd{0.2, 0.2}, md{0.3, 1.0};
  const auto merged = DiscreteMeasure::make(qd, md);
  REQUIRE(merged.size() == 1);
  CHECK(merged.q()[0] == 0.2);
  CHECK(merged.m()[0] == 1.0);
  const std::vector<double> qb{0.3, 0.1}, mb{0.5, 1.0};
  CHECK_THROWS_AS(DiscreteMeasure::make(qb, mb), ValidationError);
  const std::vector<double> qz{0.1, 0.5}, mz{1.0, 1.0};
  CHECK(DiscreteMeasure::make(qz, mz).size() == 1);
  const std::vector<double> qo{1.2}, mo{1.0};
  CHECK_THROWS_AS(DiscreteMeasure::make(qo, mo), ValidationError);
  const std::vector<double> qm{0.5}, mm{0.9};
  CHECK_THROWS_AS(DiscreteMeasure::make(qm, mm), ValidationError);
  const std::vector<double> qt{0.5}, mt{1.0 - 1e-13};
  CHECK(DiscreteMeasure::make(qt, mt).m()[0] == 1.0);
  CHECK_THROWS_AS(DiscreteMeasure::dirac(1.5), DomainError);
  CHECK(DiscreteMeasure::dirac(1.0).q()[0] == 1.0);
}

TEST_CASE("moments, distances, cdf") {
  CHECK(std::abs(moment(DiscreteMeasure::dirac(0.3), 2) - 0.09) < 1e-16);
  CHECK(moment(DiscreteMeasure::dirac(0.0), 3) == 0.0);
  const std::vector<double> q{0.2, 0.8}, m{0.5, 1.0};
  const auto two = DiscreteMeasure::make(q, m);
  CHECK(std::abs(moment(two, 2) - 0.34) < 1e-15);
  CHECK(std::abs(l1_distance(DiscreteMeasure::dirac(0.0), DiscreteMeasure::dirac(0.37)) - 0.37) < 1e-15);
  CHECK(l1_distance(two, two) == 0.0);
  CHECK(std::abs(l1_distance(DiscreteMeasure::dirac(0.2), DiscreteMeasure::dirac(0.8)) - 0.6) < 1e-15);
  CHECK(cdf_eval(DiscreteMeasure::dirac(0.5), 0.4) == 0.0);
  CHECK(cdf_eval(DiscreteMeasure::dirac(0.5), 0.5) == 1.0);
  CHECK(cdf_eval(two, 0.5) == 0.5);
  CHECK_THROWS_AS(cdf_eval(two, 1.1), DomainError);
  CHECK(l1_spread(DiscreteMeasure::dirac(0.4)) == 0.0);
  CHECK(std::abs(l1_spread(two) - 0.3) < 1e-15);
  CHECK(to_csv(two).rfind("q,m\n", 0) == 0);
}

TEST_CASE("property: power means, metric, idempotence") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_measure(rng, 1 + trial % 5);
    const auto b = random_measure(rng, 1 + (trial / 5) % 5);
    const auto c = random_measure(rng, 1 + (trial / 25) % 5);
    for (int p1 = 1; p1 <= 6; ++p1) {
      CHECK(moment(a, p1) >= 0.0);
      CHECK(moment(a, p1) <= 1.0);
      CHECK(moment(a, p1 + 1) <= moment(a, p1) + 1e-16);
      for (int p2 = p1 + 1; p2 <= 6; ++p2) {
        CHECK(std::pow(moment(a, p1), 1.0 / p1) <= std::pow(moment(a, p2), 1.0 / p2) + 1e-12);
      }
    }
    CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12);
    CHECK(std::abs(l1_distance(a, b) - l1_distance(b, a)) < 1e-15);
    CHECK(DiscreteMeasure::make(a.q(), a.m()) == a);
    const auto mid = mix(a, b, 0.5);
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      CHECK(std::abs(cdf_eval(mid, x) - 0.5 * (cdf_eval(a, x) + cdf_eval(b, x))) < 1e-12);
    }
  }
}
