#include "parisi/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "parisi/errors.hpp"

namespace parisi {

void validate_atoms(std::span<const double> qs, std::span<const double> ms) {
  if (qs.size() != ms.size()) throw ValidationError("measure: q and m must have equal length");
  if (qs.empty()) throw ValidationError("measure: at least one atom is required");
  double prev_q = 0.0;
  double prev_m = 0.0;
  for (std::size_t l = 0; l < qs.size(); ++l) {
    if (!(qs[l] >= 0.0 && qs[l] <= 1.0)) throw ValidationError("measure: location outside [0,1]");
    if (!(ms[l] >= 0.0 && ms[l] <= 1.0 + DiscreteMeasure::kMassTolerance)) {
      throw ValidationError("measure: cumulative mass outside [0,1]");
    }
    if (qs[l] < prev_q) throw ValidationError("measure: locations not nondecreasing");
    if (ms[l] < prev_m) throw ValidationError("measure: cumulative masses not nondecreasing");
    prev_q = qs[l];
    prev_m = ms[l];
  }
  if (std::abs(ms.back() - 1.0) > DiscreteMeasure::kMassTolerance) {
    throw ValidationError("measure: final cumulative mass must equal 1");
  }
}

DiscreteMeasure DiscreteMeasure::make(std::span<const double> qs, std::span<const double> ms) {
  validate_atoms(qs, ms);
  std::vector<double> q;
  std::vector<double> m;
  for (std::size_t l = 0; l < qs.size(); ++l) {
    const double ml = (l + 1 == qs.size()) ? 1.0 : std::min(ms[l], 1.0);
    if (!q.empty() && qs[l] - q.back() <= kMergeTolerance) {
      m.back() = ml;  // co-located: the later cumulative mass absorbs the earlier one
      continue;
    }
    q.push_back(qs[l]);
    m.push_back(ml);
  }
  // Drop atoms that carry no mass.
  std::vector<double> cq;
  std::vector<double> cm;
  double prev = 0.0;
  for (std::size_t l = 0; l < q.size(); ++l) {
    if (m[l] - prev > 0.0) {
      cq.push_back(q[l]);
      cm.push_back(m[l]);
      prev = m[l];
    }
  }
  return DiscreteMeasure(std::move(cq), std::move(cm));
}

DiscreteMeasure DiscreteMeasure::dirac(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("dirac: location outside [0,1]");
  return DiscreteMeasure({x}, {1.0});
}

double moment(const DiscreteMeasure& m, int p) {
  double s = 0.0;
  for (std::size_t l = 0; l < m.size(); ++l) s += m.jump(l) * std::pow(m.q()[l], p);
  return s;
}

double cdf_eval(const DiscreteMeasure& m, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("cdf_eval: argument outside [0,1]");
  double value = 0.0;
  for (std::size_t l = 0; l < m.size() && m.q()[l] <= q; ++l) value = m.m()[l];
  return value;
}

double l1_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<double> cuts{0.0, 1.0};
  cuts.insert(cuts.end(), a.q().begin(), a.q().end());
  cuts.insert(cuts.end(), b.q().begin(), b.q().end());
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double width = cuts[i + 1] - cuts[i];
    if (width <= 0.0) continue;
    total += width * std::abs(cdf_eval(a, cuts[i]) - cdf_eval(b, cuts[i]));
  }
  return total;
}

double l1_spread(const DiscreteMeasure& m) {
  // The objective is convex piecewise linear in x with kinks at the atoms.
  double best = INFINITY;
  for (double x : m.q()) {
    double s = 0.0;
    for (std::size_t l = 0; l < m.size(); ++l) s += m.jump(l) * std::abs(m.q()[l] - x);
    best = std::min(best, s);
  }
  return best;
}

DiscreteMeasure mix(const DiscreteMeasure& a, const DiscreteMeasure& b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("mix: lambda outside [0,1]");
  std::vector<double> qs(a.q().begin(), a.q().end());
  qs.insert(qs.end(), b.q().begin(), b.q().end());
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  std::vector<double> ms;
  ms.reserve(qs.size());
  for (double q : qs) ms.push_back(lambda * cdf_eval(a, q) + (1.0 - lambda) * cdf_eval(b, q));
  ms.back() = 1.0;
  for (std::size_t i = 1; i < ms.size(); ++i) ms[i] = std::max(ms[i], ms[i - 1]);
  return DiscreteMeasure::make(qs, ms);
}

std::string to_csv(const DiscreteMeasure& m) {
  std::string out = "q,m\n";
  char buf[64];
  for (std::size_t l = 0; l < m.size(); ++l) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", m.q()[l], m.m()[l]);
    out += buf;
  }
  return out;
}

}  // namespace parisi
