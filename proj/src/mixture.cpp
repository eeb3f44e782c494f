#include "parisi/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parisi/errors.hpp"

namespace parisi {

namespace {

void check_unit(double x, const char* fn) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(fn) + ": argument " + std::to_string(x) + " outside [0,1]");
  }
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

MixtureSpec::MixtureSpec(std::vector<Term> terms, double h, bool allow_degenerate)
    : terms_(std::move(terms)), h_(h), allow_degenerate_(allow_degenerate) {
  if (terms_.empty()) throw ValidationError("mixture: at least one term is required");
  if (!std::isfinite(h_)) throw ValidationError("mixture: external field must be finite");
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.p < b.p; });
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].p < 1) throw ValidationError("mixture: p must be >= 1");
    if (!std::isfinite(terms_[i].beta)) throw ValidationError("mixture: beta_p must be finite");
    if (i > 0 && terms_[i].p == terms_[i - 1].p) {
      throw ValidationError("mixture: duplicate p = " + std::to_string(terms_[i].p));
    }
  }
  const bool interacting = std::any_of(terms_.begin(), terms_.end(),
                                       [](const Term& t) { return t.p >= 2 && t.beta != 0.0; });
  if (!interacting && !allow_degenerate_) {
    throw ValidationError("mixture: some p >= 2 must have beta_p != 0 (set allow_degenerate to override)");
  }
}

MixtureSpec MixtureSpec::pure(int p, double beta, double h) { return MixtureSpec({{p, beta}}, h); }

double MixtureSpec::beta(int p) const noexcept {
  for (const auto& t : terms_) {
    if (t.p == p) return t.beta;
  }
  return 0.0;
}

bool MixtureSpec::has_term(int p) const noexcept {
  return std::any_of(terms_.begin(), terms_.end(), [p](const Term& t) { return t.p == p; });
}

MixtureSpec MixtureSpec::with_beta(int p, double beta) const {
  auto terms = terms_;
  auto it = std::find_if(terms.begin(), terms.end(), [p](const Term& t) { return t.p == p; });
  if (it == terms.end()) {
    terms.push_back({p, beta});
  } else {
    it->beta = beta;
  }
  return MixtureSpec(std::move(terms), h_, allow_degenerate_);
}

MixtureSpec MixtureSpec::with_h(double h) const { return MixtureSpec(terms_, h, allow_degenerate_); }

MixtureSpec MixtureSpec::with_degenerate_allowed() const { return MixtureSpec(terms_, h_, true); }

bool MixtureSpec::spin_flip_symmetric() const noexcept {
  if (h_ != 0.0) return false;
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.beta == 0.0 || t.p % 2 == 0; });
}

std::vector<int> MixtureSpec::active_ps() const {
  std::vector<int> ps;
  for (const auto& t : terms_) {
    if (t.beta != 0.0) ps.push_back(t.p);
  }
  return ps;
}

double xi(const MixtureSpec& spec, double x) {
  check_unit(x, "xi");
  double s = 0.0;
  for (const auto& t : spec.terms()) s += t.beta * t.beta * ipow(x, t.p);
  return s;
}

double xi_prime(const MixtureSpec& spec, double x) {
  check_unit(x, "xi_prime");
  double s = 0.0;
  for (const auto& t : spec.terms()) s += t.p * t.beta * t.beta * ipow(x, t.p - 1);
  return s;
}

double xi_second(const MixtureSpec& spec, double x) {
  check_unit(x, "xi_second");
  double s = 0.0;
  for (const auto& t : spec.terms()) {
    if (t.p >= 2) s += t.p * (t.p - 1) * t.beta * t.beta * ipow(x, t.p - 2);
  }
  return s;
}

double theta(const MixtureSpec& spec, double x) {
  check_unit(x, "theta");
  return x * xi_prime(spec, x) - xi(spec, x);
}

}  // namespace parisi
