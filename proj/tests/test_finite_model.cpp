#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "parisi/errors.hpp"
#include "parisi/finite_model.hpp"

using namespace parisi;

TEST_CASE("single spin collapses to a constant") {
  const MixtureSpec s = MixtureSpec::pure(2, 1.0, 0.3);
  const FiniteModelSample smp = sample_disorder(s, 1, 7);
  const double g = smp.disorder.at(2).at(0);
  const GibbsSummary gs = gibbs_summary(smp, {1, 2});
  CHECK(gs.log_z_over_n == doctest::Approx(g + std::log(2.0 * std::cosh(0.3))).epsilon(1e-14));
  CHECK(gs.overlap_moments.at(2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("disorder is deterministic and beta independent") {
  const MixtureSpec s({{2, 0.5}, {3, 0.2}}, 0.1);
  const auto a = sample_disorder(s, 6, 42);
  const auto b = sample_disorder(s.with_beta(2, 1.7), 6, 42);
  CHECK(a.disorder == b.disorder);
  CHECK(a.disorder.at(3).size() == 216);
  CHECK(sample_disorder(s, 6, 43).disorder != a.disorder);
}

TEST_CASE("tensor entries look standard normal") {
  const auto smp = sample_disorder(MixtureSpec::pure(3, 1.0), 20, 3);
  const auto& g = smp.disorder.at(3);
  double m = 0.0, v = 0.0;
  for (double x : g) m += x;
  m /= g.size();
  for (double x : g) v += (x - m) * (x - m);
  v /= g.size();
  CHECK(std::abs(m) < 5.0 / std::sqrt(double(g.size())));
  CHECK(std::abs(v - 1.0) < 5.0 * std::sqrt(2.0 / g.size()));
}

TEST_CASE("energy covariance is n xi(R)") {
  // Pairs of configurations with overlap 1/2 at n = 8; xi(x) = 0.25 x^2 + 0.04 x^3.
  const MixtureSpec s({{2, 0.5}, {3, 0.2}}, 0.0);
  const int n = 8, samples = 2000;
  const std::size_t a = 0, b = 0b11;  // differ in two spins: R = 4/8
  double saa = 0.0, sab = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto smp = sample_disorder(s, n, 1000 + i);
    double ea = 0.0, eb = 0.0;
    for (const Term& t : s.terms()) {
      const auto e = term_energies(smp, t.p);
      ea += t.beta * e[a];
      eb += t.beta * e[b];
    }
    saa += ea * ea;
    sab += ea * eb;
  }
  const double xi1 = 0.25 + 0.04, xih = 0.25 * 0.25 + 0.04 * 0.125;
  CHECK(std::abs(saa / samples - n * xi1) < 0.12 * n * xi1);
  CHECK(std::abs(sab / samples - n * xih) < 0.15 * n * xi1);
}

TEST_CASE("transform energies match the direct contraction") {
  const MixtureSpec s({{1, 0.3}, {2, 0.8}, {3, 0.5}, {4, 0.2}}, 0.2);
  const auto smp = sample_disorder(s, 5, 11);
  const auto ref = oracle::brute_energies(smp);
  std::vector<double> tot(ref.size(), 0.0);
  for (const Term& t : s.terms()) {
    const auto e = term_energies(smp, t.p);
    for (std::size_t c = 0; c < e.size(); ++c) {
      tot[c] += t.beta * e[c];
      if (c % 7 == 0) {
        std::vector<int> sig(5);
        for (int i = 0; i < 5; ++i) sig[i] = (c >> i & 1) ? -1 : 1;
        CHECK(e[c] == doctest::Approx(term_energy_direct(smp, t.p, sig)).epsilon(1e-12));
      }
    }
  }
  for (std::size_t c = 0; c < ref.size(); ++c) {
    double field = 0.0;
    for (int i = 0; i < 5; ++i) field += 0.2 * ((c >> i & 1) ? -1 : 1);
    CHECK(tot[c] + field == doctest::Approx(ref[c]).epsilon(1e-12));
  }
}

TEST_CASE("Gibbs summary against the brute-force double sum") {
  const MixtureSpec s({{1, 0.2}, {2, 1.1}, {3, 0.4}}, 0.25);
  const auto smp = sample_disorder(s, 7, 5);
  const GibbsSummary gs = gibbs_summary(smp, {1, 2, 3, 4});
  const oracle::Brute br = oracle::brute_gibbs(smp, 4);
  CHECK(gs.log_z_over_n == doctest::Approx(br.log_z_over_n).epsilon(1e-13));
  for (int p = 1; p <= 4; ++p) CHECK(std::abs(gs.overlap_moments.at(p) - br.moments[p]) < 1e-13);
  CHECK(std::abs(gs.overlap_mean - br.moments[1]) < 1e-13);
}

TEST_CASE("two spins by hand") {
  // n = 2, pure field: Z = (2 cosh h)^2, <R> = tanh^2 h, <R^2> = 1/2 + tanh^4 h / 2.
  const MixtureSpec s({{2, 0.0}}, 0.7, true);
  const GibbsSummary gs = gibbs_summary(sample_disorder(s, 2, 1), {1, 2});
  const double t2 = std::pow(std::tanh(0.7), 2);
  CHECK(gs.log_z_over_n == doctest::Approx(std::log(2.0 * std::cosh(0.7))).epsilon(1e-15));
  CHECK(gs.overlap_mean == doctest::Approx(t2).epsilon(1e-14));
  CHECK(gs.overlap_moments.at(2) == doctest::Approx(0.5 + 0.5 * t2 * t2).epsilon(1e-14));
}

TEST_CASE("product measure at zero coupling") {
  const MixtureSpec s({{2, 0.0}, {3, 0.0}}, 0.0, true);
  const GibbsSummary gs = gibbs_summary(sample_disorder(s, 10, 9), {2});
  CHECK(std::abs(gs.overlap_moments.at(2) - 0.1) < 1e-15);
  CHECK(std::abs(gs.log_z_over_n - std::log(2.0)) < 1e-15);
  const DisorderAverage da = disorder_average(s, 12, {2}, 50, 4);
  CHECK(da.free_energy.mean == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(da.free_energy.stderr_ == 0.0);
}

TEST_CASE("spin-flip symmetry zeroes odd moments") {
  const MixtureSpec s({{2, 1.2}, {4, 0.5}}, 0.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GibbsSummary gs = gibbs_summary(sample_disorder(s, 9, seed), {1, 2, 3});
    CHECK(gs.overlap_mean == 0.0);
    CHECK(gs.overlap_moments.at(1) == 0.0);
    CHECK(gs.overlap_moments.at(3) == 0.0);
  }
}

TEST_CASE("moment bounds and ordering") {
  const MixtureSpec s({{1, 0.3}, {2, 1.0}}, 0.2);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const GibbsSummary gs = gibbs_summary(sample_disorder(s, 8, rng()), {1, 2, 4});
    CHECK(gs.overlap_moments.at(2) >= 1.0 / 8 * 0.0);
    CHECK(gs.overlap_moments.at(2) <= 1.0 + 1e-14);
    CHECK(gs.overlap_moments.at(4) <= gs.overlap_moments.at(2) + 1e-14);
    CHECK(gs.overlap_moments.at(2) >= gs.overlap_mean * gs.overlap_mean - 1e-14);
  }
}

TEST_CASE("per-sample derivative identity") {
  const MixtureSpec s({{2, 0.9}, {3, 0.4}}, 0.3);
  for (std::uint64_t seed : {5u, 6u}) {
    const auto smp = sample_disorder(s, 10, seed);
    for (int p : {2, 3}) {
      const SampleIdentity id = per_sample_identity(smp, p);
      CHECK(std::abs(id.fd - id.identity) < 1e-8);
    }
  }
}

TEST_CASE("free energy is convex in beta") {
  const auto smp = sample_disorder(MixtureSpec::pure(2, 1.0, 0.2), 8, 17);
  for (double b = -1.0; b <= 1.0; b += 0.25) {
    const double d2 = log_z_over_n_at(smp, 2, b - 0.1) - 2 * log_z_over_n_at(smp, 2, b) + log_z_over_n_at(smp, 2, b + 0.1);
    CHECK(d2 >= -1e-13);
  }
}

TEST_CASE("integration by parts at zero coupling") {
  const MixtureSpec s({{2, 0.0}}, 0.0, true);
  const IbpResult r = ibp_check(s, 6, 2, 20, 1e-3, 3);
  // Per sample the slope is the diagonal sum, which only vanishes on average.
  CHECK(r.identity == 0.0);
  CHECK(r.stderr_ > 0.0);
  CHECK(std::abs(r.fd) <= 3.0 * r.stderr_);
  CHECK(r.pass);
  const IbpResult r4 = ibp_check(MixtureSpec::pure(2, 0.6, 0.1), 6, 4, 40, 1e-3, 3);
  CHECK(r4.identity == 0.0);
  CHECK(r4.pass);
}

TEST_CASE("parallel averages are identical") {
  const MixtureSpec s({{2, 0.7}, {3, 0.3}}, 0.2);
  const auto a = disorder_average(s, 8, {1, 2}, 30, 99, 1);
  const auto b = disorder_average(s, 8, {1, 2}, 30, 99, 4);
  CHECK(a.free_energy.mean == b.free_energy.mean);
  CHECK(a.free_energy.stderr_ == b.free_energy.stderr_);
  CHECK(a.moments.at(2).mean == b.moments.at(2).mean);
}

TEST_CASE("size validation") {
  const MixtureSpec s = MixtureSpec::pure(2, 1.0);
  CHECK_THROWS_AS(sample_disorder(s, 0, 1), ValidationError);
  CHECK_THROWS_AS(sample_disorder(s, 21, 1), ValidationError);
  CHECK_THROWS_AS(sample_disorder(MixtureSpec::pure(6, 1.0), 20, 1), ValidationError);
  CHECK_THROWS_AS(disorder_average(s, 4, {2}, 1, 1), ValidationError);
}
