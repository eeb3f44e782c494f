#include <doctest.h>

#include <cmath>
#include <random>

#include "parisi/errors.hpp"
#include "parisi/mixture.hpp"

using namespace parisi;

TEST_CASE("xi and derivatives at hand-evaluated points") {
  const MixtureSpec s2 = MixtureSpec::pure(2, 1.0);
  CHECK(xi(s2, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(xi_prime(s2, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(xi_second(s2, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(theta(s2, 0.5) == doctest::Approx(0.25).epsilon(1e-15));

  const MixtureSpec s24({{2, 1.0}, {4, 0.5}}, 0.0);
  CHECK(std::abs(xi(s24, 0.8) - 0.7424) < 1e-15);
  CHECK(std::abs(xi_prime(s24, 1.0) - 3.0) < 1e-15);
  CHECK(std::abs(theta(s24, 1.0) - 1.75) < 1e-15);
  CHECK(xi(s24, 0.0) == 0.0);
  CHECK(xi_prime(s24, 0.0) == 0.0);
  CHECK(theta(s24, 0.0) == 0.0);
}

TEST_CASE("construction rules") {
  CHECK_THROWS_AS(MixtureSpec({}, 0.0), ValidationError);
  CHECK_THROWS_AS(MixtureSpec({{1, 1.0}}, 0.0), ValidationError);
  CHECK_THROWS_AS(MixtureSpec({{2, 0.0}}, 0.3), ValidationError);
  CHECK_NOTHROW(MixtureSpec({{2, 0.0}}, 0.3, true));
  CHECK_THROWS_AS(MixtureSpec({{2, 1.0}, {2, 0.5}}, 0.0), ValidationError);
  CHECK_THROWS_AS(MixtureSpec({{0, 1.0}}, 0.0, true), ValidationError);
  CHECK_THROWS_AS(MixtureSpec({{2, NAN}}, 0.0), ValidationError);
  CHECK_THROWS_AS(MixtureSpec({{2, 1.0}}, INFINITY), ValidationError);
  CHECK_THROWS_AS(xi(MixtureSpec::pure(2, 1.0), 1.5), DomainError);
  CHECK_THROWS_AS(theta(MixtureSpec::pure(2, 1.0), -0.1), DomainError);
}

TEST_CASE("accessors and copies") {
  const MixtureSpec s({{4, 0.8}, {2, -1.0}}, 0.0);
  CHECK(s.terms().front().p == 2);
  CHECK(s.beta(2) == -1.0);
  CHECK(s.beta(3) == 0.0);
  CHECK(s.spin_flip_symmetric());
  CHECK_FALSE(s.with_h(0.1).spin_flip_symmetric());
  CHECK_FALSE(s.with_beta(3, 0.2).spin_flip_symmetric());
  CHECK(s.with_beta(3, 0.0).spin_flip_symmetric());
  CHECK(s.with_beta(6, 0.1).has_term(6));
  CHECK(s.active_ps() == std::vector<int>{2, 4});
  CHECK(s.with_degenerate_allowed().with_beta(2, 0.0).with_beta(4, 0.0).active_ps().empty());
}

TEST_CASE("property: theta identity and monotonicity on random specs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Term> terms{{1, u(rng)}, {2, u(rng)}, {3, u(rng)}, {5, u(rng)}};
    const MixtureSpec s(terms, u(rng));
    double prev_xi = -1, prev_xp = -1, prev_th = -1;
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      double termwise = 0.0;
      for (const Term& t : terms) termwise += (t.p - 1) * t.beta * t.beta * std::pow(x, t.p);
      CHECK(std::abs(theta(s, x) - termwise) <= 1e-14 * (1.0 + termwise));
      CHECK(xi(s, x) >= prev_xi);
      CHECK(xi_prime(s, x) >= prev_xp);
      CHECK(theta(s, x) >= prev_th);
      CHECK(xi(s, x) >= 0.0);
      if (x > 0) CHECK(xi_second(s, x) > 0.0);
      prev_xi = xi(s, x);
      prev_xp = xi_prime(s, x);
      prev_th = theta(s, x);
    }
  }
}
