#pragma once

#include <vector>

namespace parisi {

/// One interaction term beta_p * H_{N,p}.
struct Term {
  int p = 2;
  double beta = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Mixed p-spin model: coefficients beta_p (sparse, sorted by p) and external field h.
///
/// Construction enforces that some p >= 2 carries a nonzero coefficient, so that
/// xi''(x) > 0 on (0,1]. Degenerate models (pure field, all-zero couplings) are
/// accepted only when `allow_degenerate` is set; they are used by tests and by
/// the product-measure checks of the finite model.
class MixtureSpec {
 public:
  MixtureSpec(std::vector<Term> terms, double h, bool allow_degenerate = false);

  static MixtureSpec pure(int p, double beta, double h = 0.0);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  double h() const noexcept { return h_; }
  bool allow_degenerate() const noexcept { return allow_degenerate_; }

  /// Coefficient of H_{N,p}; zero when p is not listed.
  double beta(int p) const noexcept;
  bool has_term(int p) const noexcept;

  /// Copy with beta_p replaced (the term is added when absent). Keeps the override flag.
  MixtureSpec with_beta(int p, double beta) const;
  MixtureSpec with_h(double h) const;
  MixtureSpec with_degenerate_allowed() const;

  /// True when h == 0 and every term with beta_p != 0 has even p, i.e. the
  /// Hamiltonian is invariant under sigma -> -sigma.
  bool spin_flip_symmetric() const noexcept;

  /// p values with a nonzero coefficient.
  std::vector<int> active_ps() const;

  friend bool operator==(const MixtureSpec&, const MixtureSpec&) = default;

 private:
  std::vector<Term> terms_;
  double h_ = 0.0;
  bool allow_degenerate_ = false;
};

// xi(x) = sum_p beta_p^2 x^p and its derivatives. All require 0 <= x <= 1 and
// throw DomainError otherwise.
double xi(const MixtureSpec& spec, double x);
double xi_prime(const MixtureSpec& spec, double x);
double xi_second(const MixtureSpec& spec, double x);

/// theta(x) = x xi'(x) - xi(x) = sum_p (p-1) beta_p^2 x^p.
double theta(const MixtureSpec& spec, double x);

}  // namespace parisi
