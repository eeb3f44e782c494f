#include "parisi/finite_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "parisi/errors.hpp"
#include "parisi/parallel.hpp"
#include "parisi/rng.hpp"

namespace parisi {

namespace {

constexpr std::uint64_t kMaxTensor = std::uint64_t{1} << 25;

template <typename T>
T ipow(T x, int n) {
  T r = 1;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

template <typename T>
void fwht(std::vector<T>& a) {
  const std::size_t size = a.size();
  for (std::size_t h = 1; h < size; h <<= 1) {
    for (std::size_t i = 0; i < size; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const T x = a[j];
        const T y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
    }
  }
}

Estimate estimate(const std::vector<double>& x) {
  const double s = static_cast<double>(x.size());
  // Shifted by the first value so that constant data give an exact mean.
  double shift = 0.0;
  for (double v : x) shift += v - x[0];
  const double mean = x[0] + shift / s;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, x.size() > 1 ? std::sqrt(ss / (s - 1.0) / s) : 0.0};
}

// Total energy H_N(sigma) + h sum_i sigma_i with beta_p overridden for one p.
std::vector<double> total_energy(const FiniteModelSample& s, const std::map<int, std::vector<double>>& energies,
                                 int p_override, double beta_override) {
  const std::size_t size = std::size_t{1} << s.n;
  std::vector<double> t(size, 0.0);
  for (const auto& [p, e] : energies) {
    const double b = p == p_override ? beta_override : s.spec.beta(p);
    if (b == 0.0) continue;
    for (std::size_t c = 0; c < size; ++c) t[c] += b * e[c];
  }
  const double h = s.spec.h();
  if (h != 0.0) {
    for (std::size_t c = 0; c < size; ++c) t[c] += h * (s.n - 2 * std::popcount(c));
  }
  return t;
}

double log_sum_exp(const std::vector<double>& t) {
  const double mx = *std::max_element(t.begin(), t.end());
  long double z = 0.0L;
  for (double v : t) z += std::exp(static_cast<long double>(v) - mx);
  return static_cast<double>(mx + std::log(z));
}

std::map<int, std::vector<double>> all_energies(const FiniteModelSample& s) {
  std::map<int, std::vector<double>> out;
  for (const auto& kv : s.disorder) out.emplace(kv.first, term_energies(s, kv.first));
  return out;
}

}  // namespace

FiniteModelSample sample_disorder(const MixtureSpec& spec, int n, std::uint64_t seed, int limit) {
  if (n < 1 || n > limit) {
    throw ValidationError("sample_disorder: n = " + std::to_string(n) + " outside [1, " + std::to_string(limit) + "]");
  }
  FiniteModelSample s{n, spec, seed, {}};
  for (const Term& t : spec.terms()) {
    std::uint64_t size = 1;
    for (int k = 0; k < t.p; ++k) {
      size *= static_cast<std::uint64_t>(n);
      if (size > kMaxTensor) throw ValidationError("sample_disorder: tensor for p = " + std::to_string(t.p) + " too large");
    }
    const CounterStream rng(derive_key(seed, static_cast<std::uint64_t>(t.p), static_cast<std::uint64_t>(n)));
    std::vector<double> g(size);
    for (std::uint64_t i = 0; i < size; ++i) g[i] = rng.normal(i);
    s.disorder.emplace(t.p, std::move(g));
  }
  return s;
}

std::vector<double> term_energies(const FiniteModelSample& sample, int p) {
  const auto it = sample.disorder.find(p);
  if (it == sample.disorder.end()) throw ValidationError("term_energies: no tensor for p = " + std::to_string(p));
  const int n = sample.n;
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> c(size, 0.0);
  // Odometer over index tuples; the mask is the XOR of the index bits.
  std::vector<int> idx(p, 0);
  std::size_t mask = p % 2 == 1 ? 1 : 0;
  for (double g : it->second) {
    c[mask] += g;
    for (int k = 0; k < p; ++k) {
      mask ^= std::size_t{1} << idx[k];
      if (++idx[k] < n) {
        mask ^= std::size_t{1} << idx[k];
        break;
      }
      idx[k] = 0;
      mask ^= 1;
    }
  }
  fwht(c);
  const double scale = std::pow(static_cast<double>(n), -0.5 * (p - 1));
  for (double& v : c) v *= scale;
  if (p % 2 == 0) {
    const std::size_t all = size - 1;
    for (std::size_t x = 0; x < size; ++x) {
      if (x < (x ^ all)) c[x ^ all] = c[x];
    }
  }
  return c;
}

double term_energy_direct(const FiniteModelSample& sample, int p, const std::vector<int>& sigma) {
  const auto& g = sample.disorder.at(p);
  const int n = sample.n;
  std::vector<int> idx(p, 0);
  double sum = 0.0;
  for (double gv : g) {
    double prod = gv;
    for (int k = 0; k < p; ++k) prod *= sigma[idx[k]];
    sum += prod;
    for (int k = 0; k < p; ++k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
  return sum * std::pow(static_cast<double>(n), -0.5 * (p - 1));
}

GibbsSummary gibbs_summary(const FiniteModelSample& sample, const std::vector<int>& moment_ps) {
  const int n = sample.n;
  const std::size_t size = std::size_t{1} << n;
  const auto energies = all_energies(sample);
  const std::vector<double> t = total_energy(sample, energies, -1, 0.0);
  const double log_z = log_sum_exp(t);
  GibbsSummary g;
  g.log_z_over_n = log_z / n;

  std::vector<double> w(size);
  for (std::size_t c = 0; c < size; ++c) w[c] = std::exp(t[c] - log_z);
  for (const auto& [p, e] : energies) {
    double avg = 0.0;
    for (std::size_t c = 0; c < size; ++c) avg += w[c] * e[c];
    g.energy_per_n[p] = avg / n;
  }

  // A(d) = sum_c w(c) w(c ^ d), then P(j) = sum of A over |d| = j. Extended
  // precision: the inverse transform cancels heavily when w is far from uniform.
  std::vector<long double> a(w.begin(), w.end());
  long double total = 0.0L;
  for (long double v : a) total += v;
  for (long double& v : a) v /= total;
  fwht(a);
  for (long double& v : a) v *= v;
  fwht(a);
  std::vector<long double> pj(n + 1, 0.0L);
  for (std::size_t d = 0; d < size; ++d) pj[std::popcount(d)] += a[d] / static_cast<long double>(size);
  if (sample.spec.spin_flip_symmetric()) {
    for (int j = 0; 2 * j < n; ++j) pj[j] = pj[n - j] = 0.5 * (pj[j] + pj[n - j]);
  }
  // Paired summation: R_j and R_{n-j} are exact negatives of each other.
  auto moment = [&](int p) {
    long double sum = 0.0L;
    for (int j = 0; 2 * j <= n; ++j) {
      const long double r = static_cast<long double>(n - 2 * j) / n;
      if (2 * j == n) {
        sum += pj[j] * ipow(r, p);
      } else {
        sum += pj[j] * ipow(r, p) + pj[n - j] * ipow(-r, p);
      }
    }
    return static_cast<double>(sum);
  };
  for (int p : moment_ps) {
    if (p < 0) throw ValidationError("gibbs_summary: moment order must be >= 0");
    g.overlap_moments[p] = moment(p);
  }
  g.overlap_mean = moment(1);
  return g;
}

double log_z_over_n_at(const FiniteModelSample& sample, int p, double beta) {
  const auto energies = all_energies(sample);
  if (!energies.count(p)) throw ValidationError("log_z_over_n_at: no tensor for p = " + std::to_string(p));
  return log_sum_exp(total_energy(sample, energies, p, beta)) / sample.n;
}

SampleIdentity per_sample_identity(const FiniteModelSample& sample, int p, double step) {
  if (!(step > 0.0)) throw ValidationError("per_sample_identity: step must be positive");
  const auto energies = all_energies(sample);
  if (!energies.count(p)) throw ValidationError("per_sample_identity: no tensor for p = " + std::to_string(p));
  const double b = sample.spec.beta(p);
  auto f = [&](double beta) { return log_sum_exp(total_energy(sample, energies, p, beta)) / sample.n; };
  auto central = [&](double h) { return (f(b + h) - f(b - h)) / (2.0 * h); };
  SampleIdentity r;
  r.fd = (4.0 * central(0.5 * step) - central(step)) / 3.0;
  r.identity = gibbs_summary(sample, {}).energy_per_n.at(p);
  return r;
}

DisorderAverage disorder_average(const MixtureSpec& spec, int n, const std::vector<int>& moment_ps, int samples,
                                 std::uint64_t seed, int jobs) {
  if (samples < 2) throw ValidationError("disorder_average: samples must be >= 2");
  const auto runs = parallel_map(static_cast<std::size_t>(samples), jobs, [&](std::size_t s) {
    return gibbs_summary(sample_disorder(spec, n, derive_key(seed, 0, s)), moment_ps);
  });
  DisorderAverage out;
  out.n = n;
  out.samples = samples;
  std::vector<double> x(samples);
  for (int s = 0; s < samples; ++s) x[s] = runs[s].log_z_over_n;
  out.free_energy = estimate(x);
  for (int p : moment_ps) {
    for (int s = 0; s < samples; ++s) x[s] = runs[s].overlap_moments.at(p);
    out.moments[p] = estimate(x);
  }
  for (int s = 0; s < samples; ++s) x[s] = runs[s].overlap_mean;
  out.overlap_mean = estimate(x);
  const double mean = out.overlap_mean.mean;
  for (int s = 0; s < samples; ++s) x[s] = (runs[s].overlap_mean - mean) * (runs[s].overlap_mean - mean);
  out.overlap_mean_variance = estimate(x);
  // Unbiased variance rather than the plain mean of squared deviations.
  const double corr = static_cast<double>(samples) / (samples - 1);
  out.overlap_mean_variance.mean *= corr;
  out.overlap_mean_variance.stderr_ *= corr;
  return out;
}

IbpResult ibp_check(const MixtureSpec& spec, int n, int p, int samples, double step, std::uint64_t seed, int jobs) {
  if (samples < 2) throw ValidationError("ibp_check: samples must be >= 2");
  if (!(step > 0.0)) throw ValidationError("ibp_check: step must be positive");
  const MixtureSpec full = spec.with_degenerate_allowed().with_beta(p, spec.beta(p));
  const double b = full.beta(p);
  struct Pair {
    double fd = 0.0;
    double identity = 0.0;
  };
  const auto runs = parallel_map(static_cast<std::size_t>(samples), jobs, [&](std::size_t s) {
    const FiniteModelSample sample = sample_disorder(full, n, derive_key(seed, 0, s));
    const auto energies = all_energies(sample);
    const double up = log_sum_exp(total_energy(sample, energies, p, b + step)) / n;
    const double down = log_sum_exp(total_energy(sample, energies, p, b - step)) / n;
    const GibbsSummary g = gibbs_summary(sample, {p});
    return Pair{(up - down) / (2.0 * step), b * (1.0 - g.overlap_moments.at(p))};
  });
  std::vector<double> fd(samples), id(samples), diff(samples);
  for (int s = 0; s < samples; ++s) {
    fd[s] = runs[s].fd;
    id[s] = runs[s].identity;
    diff[s] = fd[s] - id[s];
  }
  IbpResult r;
  r.fd = estimate(fd).mean;
  r.identity = estimate(id).mean;
  r.stderr_ = estimate(diff).stderr_;
  r.pass = std::abs(r.fd - r.identity) <= 3.0 * r.stderr_ + 1e-4;
  return r;
}

}  // namespace parisi
