#pragma once
// Reference computations that share no code with the library beyond data types.

#include <cmath>
#include <functional>
#include <vector>

#include "parisi/finite_model.hpp"
#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace oracle {

struct Rule {
  std::vector<double> x, w;
};

// Probabilists' Hermite rule for N(0,1): roots of the normalized polynomial found by
// a sign scan plus Newton, weights 1 / (n psi_{n-1}(x)^2).
inline Rule hermite(int n) {
  auto psi = [n](double x, double& prev) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return p0;
    for (int k = 1; k < n; ++k) {
      const double p2 = (x * p1 - std::sqrt(double(k)) * p0) / std::sqrt(double(k + 1));
      p0 = p1;
      p1 = p2;
    }
    prev = p0;
    return p1;
  };
  Rule r;
  const double lim = std::sqrt(4.0 * n + 2.0) + 1.0;
  const double dx = 1e-3;
  double prev = 0.0;
  double a = -lim, fa = psi(a, prev);
  for (double b = -lim + dx; b <= lim; b += dx) {
    const double fb = psi(b, prev);
    if ((fa < 0) != (fb < 0)) {
      double x = 0.5 * (a + b);
      for (int it = 0; it < 50; ++it) {
        const double f = psi(x, prev);
        const double step = f / (std::sqrt(double(n)) * prev);
        x -= step;
        if (std::abs(step) < 1e-15) break;
      }
      psi(x, prev);
      r.x.push_back(x);
      r.w.push_back(1.0 / (n * prev * prev));
    }
    a = b;
    fa = fb;
  }
  double s = 0.0;
  for (double w : r.w) s += w;
  for (double& w : r.w) w /= s;
  return r;
}

// E f(Z) by composite Simpson on [-14, 14] with 28001 points.
template <typename F>
inline double simpson_gauss(F&& f) {
  const int n = 28000;
  const double a = -14.0, h = 28.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double z = a + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * f(z) * std::exp(-0.5 * z * z);
  }
  return s * h / 3.0 / std::sqrt(2.0 * M_PI);
}

inline double xi(const std::vector<std::pair<int, double>>& c, double x) {
  double s = 0.0;
  for (auto [p, b] : c) s += b * b * std::pow(x, p);
  return s;
}
inline double xi1(const std::vector<std::pair<int, double>>& c, double x) {
  double s = 0.0;
  for (auto [p, b] : c) s += p * b * b * std::pow(x, p - 1);
  return s;
}
inline double theta(const std::vector<std::pair<int, double>>& c, double x) { return x * xi1(c, x) - xi(c, x); }

// Nested tensor-product Gauss-Hermite evaluation of P(m, beta); the top layer uses
// E cosh(s + z) = exp(v/2) cosh(s). X(l, s) is X_l at partial sum s = z_0 + ... + z_l.
inline double parisi_nested(const std::vector<std::pair<int, double>>& c, double h, const std::vector<double>& q,
                            const std::vector<double>& m, int nodes) {
  const Rule r = hermite(nodes);
  const std::size_t k = q.size();
  std::vector<double> qq{0.0};
  qq.insert(qq.end(), q.begin(), q.end());
  qq.push_back(1.0);
  std::vector<double> sd(k + 1);
  sd[0] = std::sqrt(xi1(c, qq[1]));
  for (std::size_t l = 1; l <= k; ++l) sd[l] = std::sqrt(std::max(0.0, xi1(c, qq[l + 1]) - xi1(c, qq[l])));
  const double vtop = sd[k] * sd[k];
  std::function<double(std::size_t, double)> X = [&](std::size_t l, double s) -> double {
    if (l + 1 == k) {
      const double a = std::abs(s + h);
      return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0) + 0.5 * vtop;
    }
    // X_l(s) = (1/m_{l+1}) log E exp(m_{l+1} X_{l+1}(s + z_{l+1}))
    const double ml = m[l];
    std::vector<double> vals(r.x.size());
    double mx = -INFINITY;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      vals[i] = X(l + 1, s + sd[l + 1] * r.x[i]);
      mx = std::max(mx, vals[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * std::exp(ml * (vals[i] - mx));
    return mx + std::log(acc) / ml;
  };
  double ex0 = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) ex0 += r.w[i] * X(0, sd[0] * r.x[i]);
  double corr = 0.0;
  for (std::size_t l = 0; l < k; ++l) corr += m[l] * (theta(c, qq[l + 2]) - theta(c, qq[l + 1]));
  return ex0 - 0.5 * corr;
}

// Energies H_N(sigma) + h sum sigma by the defining tensor sum; sigma_i = -1 where bit i is set.
inline std::vector<double> brute_energies(const parisi::FiniteModelSample& s) {
  const int n = s.n;
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> e(size, 0.0);
  for (std::size_t c = 0; c < size; ++c) {
    std::vector<int> sig(n);
    for (int i = 0; i < n; ++i) sig[i] = (c >> i & 1) ? -1 : 1;
    double tot = 0.0;
    for (const auto& [p, g] : s.disorder) {
      double sum = 0.0;
      for (std::size_t t = 0; t < g.size(); ++t) {
        std::size_t rest = t;
        double prod = g[t];
        for (int k = 0; k < p; ++k) {
          prod *= sig[rest % n];
          rest /= n;
        }
        sum += prod;
      }
      tot += s.spec.beta(p) * sum / std::pow(double(n), 0.5 * (p - 1));
    }
    for (int i = 0; i < n; ++i) tot += s.spec.h() * sig[i];
    e[c] = tot;
  }
  return e;
}

struct Brute {
  double log_z_over_n;
  std::vector<double> moments;  // index p
};

// Exact double sum over replica pairs.
inline Brute brute_gibbs(const parisi::FiniteModelSample& s, int max_p) {
  const int n = s.n;
  const auto e = brute_energies(s);
  double mx = -INFINITY;
  for (double v : e) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : e) z += std::exp(v - mx);
  std::vector<double> w(e.size());
  for (std::size_t c = 0; c < e.size(); ++c) w[c] = std::exp(e[c] - mx) / z;
  Brute b{(mx + std::log(z)) / n, std::vector<double>(max_p + 1, 0.0)};
  for (std::size_t a = 0; a < e.size(); ++a) {
    for (std::size_t c = 0; c < e.size(); ++c) {
      int dot = 0;
      for (int i = 0; i < n; ++i) dot += (((a ^ c) >> i) & 1) ? -1 : 1;
      const double r = double(dot) / n;
      double rp = 1.0;
      for (int p = 0; p <= max_p; ++p) {
        b.moments[p] += w[a] * w[c] * rp;
        rp *= r;
      }
    }
  }
  return b;
}

}  // namespace oracle
