#pragma once

#include <span>
#include <string>
#include <vector>

namespace parisi {

/// Distribution function on [0,1] with finitely many atoms.
///
/// Stored as atom locations q_1 < ... < q_k and cumulative masses
/// 0 < m_1 < ... < m_k = 1, so that m(q) = m_l for q_l <= q < q_{l+1}
/// (with q_0 = 0, m_0 = 0, q_{k+1} = 1). Instances are always canonical:
/// locations closer than `kMergeTolerance` are merged and zero-mass atoms dropped.
class DiscreteMeasure {
 public:
  static constexpr double kMergeTolerance = 1e-12;
  static constexpr double kMassTolerance = 1e-12;

  /// Validates and canonicalizes. Throws ValidationError on unordered input,
  /// values outside [0,1], length mismatch, or a final mass away from 1.
  static DiscreteMeasure make(std::span<const double> qs, std::span<const double> ms);
  static DiscreteMeasure dirac(double x);

  std::size_t size() const noexcept { return q_.size(); }
  std::span<const double> q() const noexcept { return q_; }
  std::span<const double> m() const noexcept { return m_; }

  /// Mass of atom l (0-based): m_l - m_{l-1}.
  double jump(std::size_t l) const noexcept { return m_[l] - (l == 0 ? 0.0 : m_[l - 1]); }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  DiscreteMeasure(std::vector<double> q, std::vector<double> m) : q_(std::move(q)), m_(std::move(m)) {}
  std::vector<double> q_;
  std::vector<double> m_;
};

/// Checks the ordering constraints on raw (possibly non-canonical) atom sequences:
/// equal nonzero length, 0 <= q_1 <= ... <= q_k <= 1, 0 <= m_1 <= ... <= m_k = 1.
void validate_atoms(std::span<const double> qs, std::span<const double> ms);

/// int q^p dm.
double moment(const DiscreteMeasure& m, int p);

/// int_0^1 |m1(q) - m2(q)| dq, exact.
double l1_distance(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Right-continuous value m(q); DomainError outside [0,1].
double cdf_eval(const DiscreteMeasure& m, double q);

/// min_x int |q - x| dm(q), attained at a median atom.
double l1_spread(const DiscreteMeasure& m);

/// Pointwise mixture lambda*a + (1-lambda)*b of the two distribution functions.
DiscreteMeasure mix(const DiscreteMeasure& a, const DiscreteMeasure& b, double lambda);

/// "q,m" header followed by one row per atom, 17 significant digits.
std::string to_csv(const DiscreteMeasure& m);

}  // namespace parisi
