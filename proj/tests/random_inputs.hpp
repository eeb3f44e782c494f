#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace testgen {

// Random mixture over p in {1..4} (at least one p >= 2), rescaled to xi'(1) = target.
inline parisi::MixtureSpec spec(std::mt19937_64& rng, double target, bool field = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<parisi::Term> terms;
  for (int p = 1; p <= 4; ++p) {
    if (p == 2 || u(rng) < 0.5) terms.push_back({p, u(rng) + 0.05});
  }
  double d = 0.0;
  for (const auto& t : terms) d += t.p * t.beta * t.beta;
  for (auto& t : terms) t.beta *= std::sqrt(target / d);
  return parisi::MixtureSpec(terms, field ? 0.6 * u(rng) : 0.0);
}

inline std::vector<std::pair<int, double>> coeffs(const parisi::MixtureSpec& s) {
  std::vector<std::pair<int, double>> c;
  for (const auto& t : s.terms()) c.push_back({t.p, t.beta});
  return c;
}

// k atoms with separated locations and jumps.
inline parisi::DiscreteMeasure measure(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::vector<double> q(k), m(k);
  for (;;) {
    for (auto& v : q) v = u(rng);
    for (auto& v : m) v = u(rng);
    std::sort(q.begin(), q.end());
    std::sort(m.begin(), m.end());
    m.back() = 1.0;
    bool ok = true;
    for (int i = 1; i < k; ++i) ok = ok && q[i] - q[i - 1] > 0.02 && m[i] - m[i - 1] > 0.02;
    if (ok) return parisi::DiscreteMeasure::make(q, m);
  }
}

}  // namespace testgen
