#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "parisi/errors.hpp"
#include "parisi/phase.hpp"

using namespace parisi;

namespace {

const QuadratureConfig kQuad{};

OptimizerOptions fast() {
  OptimizerOptions o;
  o.restarts = 3;
  return o;
}

// E tanh^2(sqrt(v) z + h) by Simpson, independent of the library's rules.
double tanh2(double v, double h) {
  return oracle::simpson_gauss([&](double z) {
    const double t = std::tanh(std::sqrt(v) * z + h);
    return t * t;
  });
}

}  // namespace

TEST_CASE("fixed-point oracle roots") {
  const auto low = fixed_point_oracle(MixtureSpec::pure(2, 0.4));
  REQUIRE(low.size() == 1);
  CHECK(low[0] == 0.0);

  const MixtureSpec hi = MixtureSpec::pure(2, 1.2);
  const auto roots = fixed_point_oracle(hi);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == 0.0);
  const double q = roots[1];
  CHECK(q > 0.3);
  CHECK(std::abs(q - tanh2(2.0 * 1.44 * q, 0.0)) < 1e-8);

  const auto field = fixed_point_oracle(MixtureSpec::pure(2, 0.6, 0.5));
  REQUIRE_FALSE(field.empty());
  CHECK(field.front() > 0.0);
}

TEST_CASE("best Dirac at a field matches the fixed point") {
  const MixtureSpec s = MixtureSpec::pure(2, 0.4, 0.3);
  const DiracOptimum d = rs_best_dirac(s, kQuad);
  const auto roots = fixed_point_oracle(s);
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(d.q - roots[0]) < 1e-6);
  CHECK(std::abs(d.q - tanh2(2.0 * 0.16 * d.q, 0.3)) < 1e-6);

  CHECK(rs_best_dirac(MixtureSpec::pure(2, 0.4), kQuad).q == 0.0);
}

TEST_CASE("classify low temperature and high temperature") {
  const PhaseDiagnostics rs = classify(MixtureSpec::pure(2, 0.4), 2, 1e-7, kQuad, fast());
  CHECK(rs.is_rs);
  CHECK(rs.rs_reference == "delta_0");
  CHECK(rs.l1_spread == 0.0);
  CHECK_FALSE(rs.symmetric_witness);

  const PhaseDiagnostics rsb = classify(MixtureSpec::pure(2, 1.2), 2, 1e-7, kQuad, fast());
  CHECK_FALSE(rsb.is_rs);
  CHECK(rsb.rs_margin > 1e-3);
  CHECK(rsb.symmetric_witness);
  CHECK(rsb.moments.at(2) > 0.0);
  CHECK(std::abs(rsb.variance_proxy - rsb.variance_direct) < 1e-12);
  CHECK(rsb.ladder_value <= rsb.rs_reference_value);
  CHECK_FALSE(rsb.conjectural);

  const PhaseDiagnostics f = classify(MixtureSpec::pure(2, 0.5, 0.2), 1, 1e-7, kQuad, fast());
  CHECK(f.rs_reference == "best_dirac");
  CHECK(f.conjectural);
}

TEST_CASE("classify invariants on a mixed model") {
  const MixtureSpec s({{2, 1.0}, {4, 1.2}}, 0.0);
  const PhaseDiagnostics d = classify(s, 2, 1e-7, kQuad, fast());
  CHECK(d.rs_margin >= -1e-12);
  CHECK(d.moments.size() == 2);
  REQUIRE(d.moment_gap.count({2, 4}) == 1);
  const double m2 = moment(d.measure, 2), m4 = moment(d.measure, 4);
  CHECK(d.moment_gap.at({2, 4}) == doctest::Approx(std::sqrt(m2) - std::pow(m4, 0.25)).epsilon(1e-12));
  CHECK(d.variance_proxy >= -1e-15);
  CHECK(d.moments.at(4) <= d.moments.at(2) + 1e-15);
}

TEST_CASE("beta grid") {
  const auto g = beta_grid(0.5, 1.0, 0.1);
  REQUIRE(g.size() == 6);
  CHECK(g.front() == 0.5);
  CHECK(std::abs(g.back() - 1.0) < 1e-12);
  CHECK_THROWS_AS(beta_grid(1.0, 0.5, 0.1), ValidationError);
}

TEST_CASE("boundary scan without a transition") {
  const BoundaryScan b = boundary_scan(MixtureSpec::pure(2, 0.1), 2, {0.2, 0.3, 0.4}, 1, 1e-7, kQuad, fast());
  CHECK_FALSE(b.beta_c.has_value());
  CHECK(b.single_flip);
  CHECK(b.note == "no transition in range");
  REQUIRE(b.rows.size() == 3);
  for (const auto& r : b.rows) {
    CHECK(r.is_rs);
    CHECK_FALSE(r.oracle_nontrivial);
  }
}

TEST_CASE("boundary scan over the pure 2-spin transition") {
  const BoundaryScan b = boundary_scan(MixtureSpec::pure(2, 0.5), 2, beta_grid(0.6, 0.9, 0.05), 1, 1e-7, kQuad, fast(), 1, 1e-2);
  REQUIRE(b.beta_c.has_value());
  REQUIRE(b.oracle_beta_c.has_value());
  CHECK(std::abs(*b.oracle_beta_c - std::sqrt(0.5)) < 1e-5);
  CHECK(std::abs(*b.beta_c - std::sqrt(0.5)) < 0.03);
  CHECK(b.single_flip);
}

namespace {

// Dense search over Diracs and over {0, q} two-atom measures; returns the best value.
double grid_search_min(const MixtureSpec& s) {
  double best = INFINITY;
  for (int i = 0; i <= 200; ++i) best = std::min(best, evaluate(s, DiscreteMeasure::dirac(i / 200.0), kQuad).value);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 60; ++j) {
      const double q = 0.85 + 0.0025 * i, m = 0.85 + 0.0025 * j;
      best = std::min(best, evaluate_atoms(s, std::vector<double>{0.0, q}, std::vector<double>{m, 1.0}, kQuad).value);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("pure 4-spin transition against a dense grid search") {
  const MixtureSpec base = MixtureSpec::pure(4, 1.0);
  const BoundaryScan b = boundary_scan(base, 4, beta_grid(1.0, 1.3, 0.05), 2, 1e-7, kQuad, fast());
  REQUIRE(b.beta_c.has_value());
  CHECK(b.single_flip);
  const double bc = *b.beta_c;
  const MixtureSpec below = base.with_beta(4, bc - 0.01), above = base.with_beta(4, bc + 0.01);
  const double d0_below = evaluate(below, DiscreteMeasure::dirac(0.0), kQuad).value;
  const double d0_above = evaluate(above, DiscreteMeasure::dirac(0.0), kQuad).value;
  CHECK(grid_search_min(below) >= d0_below - 1e-7);
  CHECK(grid_search_min(above) < d0_above - 1e-7);
}
