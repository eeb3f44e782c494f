#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "parisi/mixture.hpp"

namespace parisi {

inline constexpr int kEnumerationLimit = 20;

/// One disorder realization: a dense tensor g_{i1..ip} of n^p standard Gaussians
/// for every term of the spec (including terms whose beta is 0, so that beta
/// derivatives can be taken on the same disorder).
struct FiniteModelSample {
  int n = 0;
  MixtureSpec spec;
  std::uint64_t seed = 0;
  /// p -> tensor, index i1 + n i2 + n^2 i3 + ...
  std::map<int, std::vector<double>> disorder;
};

/// Tensors come from CounterStream(derive_key(seed, p, n)); they do not depend on beta.
/// Throws ValidationError unless 1 <= n <= limit and every tensor has at most 2^25 entries.
FiniteModelSample sample_disorder(const MixtureSpec& spec, int n, std::uint64_t seed, int limit = kEnumerationLimit);

/// H_{N,p}(sigma) for every configuration. Bit i of the index set means sigma_i = -1.
/// Computed by collapsing each tuple to the parity mask of its indices followed by a
/// Walsh-Hadamard transform, which is algebraically the direct sum.
std::vector<double> term_energies(const FiniteModelSample& sample, int p);

/// H_{N,p}(sigma) by the direct tensor contraction (slow; reference for tests).
double term_energy_direct(const FiniteModelSample& sample, int p, const std::vector<int>& sigma);

struct GibbsSummary {
  double log_z_over_n = 0.0;
  /// p -> <R^p>
  std::map<int, double> overlap_moments;
  double overlap_mean = 0.0;
  /// p -> <H_{N,p}>/n
  std::map<int, double> energy_per_n;
};

/// Exact enumeration of all 2^n configurations. Overlap moments are the double sum
/// over replica pairs, factorized through the XOR autocorrelation of the Gibbs weights.
GibbsSummary gibbs_summary(const FiniteModelSample& sample, const std::vector<int>& moment_ps);

/// (1/n) log Z for the sample's disorder with beta_p replaced by `beta`.
double log_z_over_n_at(const FiniteModelSample& sample, int p, double beta);

/// Per-sample check of d/d beta_p (1/n) log Z = <H_{N,p}>/n.
struct SampleIdentity {
  double fd = 0.0;
  double identity = 0.0;
};
SampleIdentity per_sample_identity(const FiniteModelSample& sample, int p, double step = 1e-3);

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct DisorderAverage {
  int n = 0;
  int samples = 0;
  Estimate free_energy;
  std::map<int, Estimate> moments;
  Estimate overlap_mean;
  /// E(<R> - E<R>)^2 over the disorder.
  Estimate overlap_mean_variance;
};

/// Sample s uses seed derive_key(seed, 0, s). Samples run on up to `jobs` threads;
/// reductions are in sample order.
DisorderAverage disorder_average(const MixtureSpec& spec, int n, const std::vector<int>& moment_ps, int samples,
                                 std::uint64_t seed, int jobs = 1);

struct IbpResult {
  double fd = 0.0;
  double identity = 0.0;
  /// Standard error of the per-sample difference fd_s - identity_s.
  double stderr_ = 0.0;
  bool pass = false;
};

/// Central difference of (1/n) E log Z in beta_p (common disorder) against
/// beta_p (1 - E<R^p>). Pass iff |fd - identity| <= 3 stderr + 1e-4.
IbpResult ibp_check(const MixtureSpec& spec, int n, int p, int samples, double step, std::uint64_t seed, int jobs = 1);

}  // namespace parisi
