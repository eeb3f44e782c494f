#include "parisi/optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parisi/errors.hpp"
#include "parisi/rng.hpp"

namespace parisi {

void OptimizerOptions::validate() const {
  if (restarts < 1) throw ValidationError("optimizer: restarts must be >= 1");
  if (max_iters < 1) throw ValidationError("optimizer: max_iters must be >= 1");
  if (!(value_tol > 0.0)) throw ValidationError("optimizer: value_tol must be positive");
  if (!(stationarity_tol > 0.0)) throw ValidationError("optimizer: stationarity_tol must be positive");
  if (!(tie_tol > 0.0)) throw ValidationError("optimizer: tie_tol must be positive");
}

std::string to_string(SearchStrategy s) { return s == SearchStrategy::simplex ? "simplex" : "gradient"; }

SearchStrategy parse_strategy(const std::string& s) {
  if (s == "simplex") return SearchStrategy::simplex;
  if (s == "gradient") return SearchStrategy::gradient;
  throw ValidationError("optimizer: unknown strategy '" + s + "'");
}

namespace {

using Vec = Eigen::VectorXd;

struct Atoms {
  std::vector<double> q;
  std::vector<double> m;
};

// Unconstrained coordinates x in R^{2k-1}:
//   q_l = S_l / (1 + S_k),         S_l = x_1^2 + ... + x_l^2
//   m_l = T_l / (1 + T_{k-1}),     T_l = x_{k+1}^2 + ... + x_{k+l}^2   (l < k), m_k = 1.
Atoms decode(const Vec& x, int k) {
  Atoms a;
  a.q.resize(k);
  a.m.resize(k);
  double s = 0.0;
  for (int l = 0; l < k; ++l) {
    s += x[l] * x[l];
    a.q[l] = s;
  }
  for (double& q : a.q) q /= 1.0 + s;
  double t = 0.0;
  for (int l = 0; l + 1 < k; ++l) {
    t += x[k + l] * x[k + l];
    a.m[l] = t;
  }
  for (int l = 0; l + 1 < k; ++l) a.m[l] /= 1.0 + t;
  a.m[k - 1] = 1.0;
  return a;
}

constexpr double kEncodeCap = 1.0 - 1e-9;

Vec encode(const Atoms& a) {
  const int k = static_cast<int>(a.q.size());
  Vec x(2 * k - 1);
  const double top = std::min(a.q.back(), kEncodeCap);
  const double scale = 1.0 + top / (1.0 - top);
  double prev = 0.0;
  for (int l = 0; l < k; ++l) {
    const double s = std::min(a.q[l], kEncodeCap) * scale;
    x[l] = std::sqrt(std::max(0.0, s - prev));
    prev = std::max(prev, s);
  }
  if (k > 1) {
    const double mtop = std::min(a.m[k - 2], kEncodeCap);
    const double mscale = 1.0 + mtop / (1.0 - mtop);
    prev = 0.0;
    for (int l = 0; l + 1 < k; ++l) {
      const double t = std::min(a.m[l], kEncodeCap) * mscale;
      x[k + l] = std::sqrt(std::max(0.0, t - prev));
      prev = std::max(prev, t);
    }
  }
  return x;
}

class Objective {
 public:
  Objective(const MixtureSpec& spec, const QuadratureConfig& quad) : spec_(spec), quad_(quad) {}

  double atoms(const std::vector<double>& q, const std::vector<double>& m) {
    ++evaluations;
    return evaluate_value(spec_, q, m, quad_);
  }
  double atoms(const Atoms& a) { return atoms(a.q, a.m); }
  double operator()(const Vec& x, int k) { return atoms(decode(x, k)); }

  long evaluations = 0;

 private:
  const MixtureSpec& spec_;
  const QuadratureConfig& quad_;
};

struct LocalResult {
  Vec x;
  double value = 0.0;
  bool converged = true;
};

LocalResult nelder_mead(Objective& f, int k, const Vec& start, int max_iters, double tol) {
  const int n = static_cast<int>(start.size());
  std::vector<Vec> pts(n + 1, start);
  std::vector<double> val(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1][i] += (std::abs(start[i]) > 0.5 ? 0.2 * std::abs(start[i]) : 0.1);
  for (int i = 0; i <= n; ++i) val[i] = f(pts[i], k);
  std::vector<int> order(n + 1);
  LocalResult out;
  out.converged = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second = order[n - 1];
    if (val[worst] - val[best] <= tol) {
      out.converged = true;
      break;
    }
    Vec centroid = Vec::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= n;
    const Vec reflected = centroid + (centroid - pts[worst]);
    const double fr = f(reflected, k);
    if (fr < val[best]) {
      const Vec expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(expanded, k);
      if (fe < fr) {
        pts[worst] = expanded;
        val[worst] = fe;
      } else {
        pts[worst] = reflected;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = reflected;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const Vec contracted = outside ? Vec(centroid + 0.5 * (reflected - centroid))
                                   : Vec(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(contracted, k);
    if (fc < std::min(fr, val[worst])) {
      pts[worst] = contracted;
      val[worst] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      val[i] = f(pts[i], k);
    }
  }
  const int best = static_cast<int>(std::min_element(val.begin(), val.end()) - val.begin());
  out.x = pts[best];
  out.value = val[best];
  return out;
}

constexpr double kGradientStep = 1e-5;

Vec fd_gradient(Objective& f, int k, const Vec& x) {
  Vec g(x.size());
  Vec y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = kGradientStep * std::max(1.0, std::abs(x[i]));
    y[i] = x[i] + h;
    const double up = f(y, k);
    y[i] = x[i] - h;
    const double down = f(y, k);
    y[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Quasi-Newton refinement of a simplex result with central-difference gradients.
LocalResult bfgs_polish(Objective& f, int k, LocalResult start, int max_iters, double tol) {
  const Eigen::Index n = start.x.size();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  Vec x = start.x;
  double fx = start.value;
  Vec g = fd_gradient(f, k, x);
  int stalls = 0;
  start.converged = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < 1e-10) {
      start.converged = true;
      break;
    }
    Vec dir = -inv * g;
    if (dir.dot(g) >= 0.0) {
      inv.setIdentity();
      dir = -g;
    }
    double t = 1.0;
    Vec xn;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + t * dir;
      fn = f(xn, k);
      if (fn <= fx + 1e-4 * t * dir.dot(g)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || !(fn < fx)) {
      start.converged = true;
      break;
    }
    const Vec gn = fd_gradient(f, k, xn);
    const Vec s = xn - x;
    const Vec yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      inv = (id - rho * s * yv.transpose()) * inv * (id - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
    stalls = (fx - fn <= tol) ? stalls + 1 : 0;
    x = xn;
    fx = fn;
    g = gn;
    if (stalls >= 2) {
      start.converged = true;
      break;
    }
  }
  start.x = x;
  start.value = fx;
  return start;
}

// Euclidean projection onto nondecreasing sequences (pool adjacent violators),
// then clipping to [0, 1].
void project_monotone(std::vector<double>& v) {
  std::vector<double> level;
  std::vector<int> count;
  for (double x : v) {
    level.push_back(x);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const double merged = (level[level.size() - 2] * count[count.size() - 2] + level.back() * count.back()) /
                            (count[count.size() - 2] + count.back());
      const int c = count[count.size() - 2] + count.back();
      level.pop_back();
      count.pop_back();
      level.back() = merged;
      count.back() = c;
    }
  }
  std::size_t i = 0;
  for (std::size_t b = 0; b < level.size(); ++b) {
    for (int c = 0; c < count[b]; ++c) v[i++] = std::clamp(level[b], 0.0, 1.0);
  }
}

// Projected finite-difference gradient descent on (q_1..q_k, m_1..m_{k-1}) with
// Barzilai-Borwein steps and backtracking.
LocalResult projected_gradient(Objective& f, int k, const Atoms& start, int max_iters, double tol) {
  auto eval = [&](const Vec& z) {
    Atoms a;
    a.q.assign(z.data(), z.data() + k);
    a.m.assign(z.data() + k, z.data() + 2 * k - 1);
    a.m.push_back(1.0);
    return f.atoms(a);
  };
  auto project = [&](Vec& z) {
    std::vector<double> q(z.data(), z.data() + k);
    std::vector<double> m(z.data() + k, z.data() + 2 * k - 1);
    project_monotone(q);
    project_monotone(m);
    for (int l = 0; l < k; ++l) z[l] = q[l];
    for (int l = 0; l + 1 < k; ++l) z[k + l] = m[l];
  };
  auto gradient = [&](const Vec& z) {
    Vec g(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      Vec up = z;
      Vec down = z;
      up[i] = std::min(1.0, z[i] + kGradientStep);
      down[i] = std::max(0.0, z[i] - kGradientStep);
      project(up);
      project(down);
      g[i] = (eval(up) - eval(down)) / std::max(up[i] - down[i], 1e-300);
    }
    return g;
  };
  Vec z(2 * k - 1);
  for (int l = 0; l < k; ++l) z[l] = start.q[l];
  for (int l = 0; l + 1 < k; ++l) z[k + l] = start.m[l];
  project(z);
  double fz = eval(z);
  Vec g = gradient(z);
  double step = 0.1;
  LocalResult out;
  out.converged = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    Vec zn;
    double fn = fz;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      zn = z - step * g;
      project(zn);
      fn = eval(zn);
      if (fn <= fz - 1e-4 * (zn - z).squaredNorm() / step) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || fz - fn <= tol) {
      if (accepted && fn < fz) {
        z = zn;
        fz = fn;
      }
      out.converged = true;
      break;
    }
    const Vec gn = gradient(zn);
    const Vec s = zn - z;
    const Vec yv = gn - g;
    const double sy = s.dot(yv);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-6, 10.0) : std::min(10.0, 2.0 * step);
    z = zn;
    fz = fn;
    g = gn;
  }
  Atoms a;
  a.q.assign(z.data(), z.data() + k);
  a.m.assign(z.data() + k, z.data() + 2 * k - 1);
  a.m.push_back(1.0);
  out.x = encode(a);
  out.value = fz;
  return out;
}

constexpr double kSnapLocation = 1e-4;
constexpr double kSnapMass = 1e-6;
constexpr double kSnapSlack = 1e-12;

// Removes near-degenerate structure: atoms close to 0 or 1 are moved there,
// near-coincident atoms merged and near-massless atoms dropped, each change kept
// only when the value does not increase beyond kSnapSlack.
Atoms simplify(Objective& f, Atoms a, double& value) {
  auto canonical = [](const Atoms& raw) {
    const DiscreteMeasure d = DiscreteMeasure::make(raw.q, raw.m);
    return Atoms{std::vector<double>(d.q().begin(), d.q().end()), std::vector<double>(d.m().begin(), d.m().end())};
  };
  a = canonical(a);
  auto try_accept = [&](const Atoms& cand) {
    const Atoms c = canonical(cand);
    const double v = f.atoms(c);
    if (v <= value + kSnapSlack) {
      a = c;
      value = std::min(value, v);
      return true;
    }
    return false;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    const std::size_t k = a.q.size();
    if (a.q.front() > 0.0 && a.q.front() < kSnapLocation) {
      Atoms c = a;
      c.q.front() = 0.0;
      if (try_accept(c)) {
        changed = true;
        continue;
      }
    }
    if (a.q.back() < 1.0 && a.q.back() > 1.0 - kSnapLocation) {
      Atoms c = a;
      c.q.back() = 1.0;
      if (try_accept(c)) {
        changed = true;
        continue;
      }
    }
    for (std::size_t l = 0; l + 1 < k && !changed; ++l) {
      if (a.q[l + 1] - a.q[l] >= kSnapLocation) continue;
      const double w0 = a.m[l] - (l == 0 ? 0.0 : a.m[l - 1]);
      const double w1 = a.m[l + 1] - a.m[l];
      for (double loc : {(w0 * a.q[l] + w1 * a.q[l + 1]) / (w0 + w1), a.q[l], a.q[l + 1]}) {
        Atoms c = a;
        c.q[l] = loc;
        c.q[l + 1] = loc;
        if (try_accept(c)) {
          changed = true;
          break;
        }
      }
    }
    for (std::size_t l = 0; l < k && !changed && k > 1; ++l) {
      const double w = a.m[l] - (l == 0 ? 0.0 : a.m[l - 1]);
      if (w >= kSnapMass) continue;
      Atoms c = a;
      if (l + 1 < k) {
        // The mass moves to the next atom.
        c.q.erase(c.q.begin() + l);
        c.m.erase(c.m.begin() + l);
      } else {
        c.q.pop_back();
        c.m.pop_back();
        c.m.back() = 1.0;
      }
      if (try_accept(c)) changed = true;
    }
  }
  return a;
}

Atoms pad_atoms(const Atoms& a, int k) {
  Atoms out = a;
  while (static_cast<int>(out.q.size()) < k) {
    const std::size_t n = out.q.size();
    double best_gap = -1.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double lo = i == 0 ? 0.0 : out.q[i - 1];
      const double hi = i == n ? 1.0 : out.q[i];
      if (hi - lo > best_gap) {
        best_gap = hi - lo;
        pos = i;
      }
    }
    const double lo = pos == 0 ? 0.0 : out.q[pos - 1];
    const double hi = pos == n ? 1.0 : out.q[pos];
    out.q.insert(out.q.begin() + pos, 0.5 * (lo + hi));
    if (pos == n) {
      // New last atom takes half of the old last jump.
      const double below = n >= 2 ? out.m[n - 2] : 0.0;
      out.m[n - 1] = 0.5 * (below + 1.0);
      out.m.push_back(1.0);
    } else {
      // New atom takes half of the jump of the atom above it.
      const double below = pos == 0 ? 0.0 : out.m[pos - 1];
      out.m.insert(out.m.begin() + pos, 0.5 * (below + out.m[pos]));
    }
  }
  return out;
}

Atoms to_atoms(const DiscreteMeasure& d) {
  return Atoms{std::vector<double>(d.q().begin(), d.q().end()), std::vector<double>(d.m().begin(), d.m().end())};
}

// Coarse scan plus golden-section refinement of the single-atom value.
// Best of a coarse grid of two-atom measures; seeds basins that are separated
// from every Dirac (e.g. an atom at 0 plus one near 1).
Atoms best_two_atom(Objective& f) {
  static constexpr double kQ[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  static constexpr double kM[] = {0.1, 0.3, 0.5, 0.7, 0.9, 0.97, 0.99};
  Atoms best{{0.0, 0.5}, {0.5, 1.0}};
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::size(kQ); ++i) {
    for (std::size_t j = i + 1; j < std::size(kQ); ++j) {
      for (double m : kM) {
        const Atoms a{{kQ[i], kQ[j]}, {m, 1.0}};
        const double v = f.atoms(a);
        if (v < best_v) {
          best_v = v;
          best = a;
        }
      }
    }
  }
  return best;
}

double best_dirac_location(Objective& f) {
  constexpr int kGrid = 201;
  double best_q = 0.0;
  double best_v = std::numeric_limits<double>::infinity();
  std::vector<double> vals(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double q = static_cast<double>(i) / (kGrid - 1);
    vals[i] = f.atoms({q}, {1.0});
    if (vals[i] < best_v) {
      best_v = vals[i];
      best_q = q;
    }
  }
  const double h = 1.0 / (kGrid - 1);
  double a = std::max(0.0, best_q - h);
  double b = std::min(1.0, best_q + h);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f.atoms({c}, {1.0});
  double fd = f.atoms({d}, {1.0});
  for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f.atoms({c}, {1.0});
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f.atoms({d}, {1.0});
    }
  }
  const double cand = 0.5 * (a + b);
  return f.atoms({cand}, {1.0}) < best_v ? cand : best_q;
}

bool lex_less(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a.q()[l] != b.q()[l]) return a.q()[l] < b.q()[l];
  }
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a.m()[l] != b.m()[l]) return a.m()[l] < b.m()[l];
  }
  return false;
}

constexpr double kDistinctL1 = 1e-4;

}  // namespace

StationarityReport stationarity_certificate(const MixtureSpec& spec, const DiscreteMeasure& m,
                                            const QuadratureConfig& quad, double tol) {
  constexpr double kProbeStep = 1e-2;
  StationarityReport rep;
  const std::size_t k = m.size();
  std::vector<double> qs(m.q().begin(), m.q().end());
  const std::vector<double> ms(m.m().begin(), m.m().end());
  const double base = evaluate_value(spec, qs, ms, quad);
  for (std::size_t l = 0; l < k; ++l) {
    AtomResidual r;
    r.index = l;
    r.coordinate = 'q';
    const bool at_zero = l == 0 && qs[0] == 0.0;
    const bool at_one = l + 1 == k && qs[l] == 1.0;
    r.boundary = at_zero || at_one;
    try {
      const PartialDerivative d = partial_q(spec, m, l, quad);
      r.value = d.value;
      r.direction = d.direction;
    } catch (const AdmissibilityError&) {
      r.ok = true;  // no feasible perturbation: nothing to certify
      rep.residuals.push_back(r);
      continue;
    }
    if (r.boundary) {
      const int dir = at_zero ? 1 : -1;
      const double lower = l == 0 ? 0.0 : qs[l - 1];
      const double upper = l + 1 == k ? 1.0 : qs[l + 1];
      const double room = dir > 0 ? upper - qs[l] : qs[l] - lower;
      const double step = std::min(kProbeStep, 0.5 * room);
      std::vector<double> moved = qs;
      moved[l] += dir * step;
      r.finite_quotient = step > 0.0 ? (evaluate_value(spec, moved, ms, quad) - base) / step : 0.0;
      r.ok = dir * r.value >= -tol && r.finite_quotient >= -tol;
    } else {
      r.ok = std::abs(r.value) <= tol;
      rep.max_interior_residual = std::max(rep.max_interior_residual, std::abs(r.value));
    }
    rep.residuals.push_back(r);
  }
  for (std::size_t l = 0; l + 1 < k; ++l) {
    AtomResidual r;
    r.index = l;
    r.coordinate = 'm';
    try {
      const PartialDerivative d = partial_m(spec, m, l, quad);
      r.value = d.value;
      r.direction = d.direction;
    } catch (const AdmissibilityError&) {
      rep.residuals.push_back(r);
      continue;
    }
    r.ok = std::abs(r.value) <= tol;
    rep.max_interior_residual = std::max(rep.max_interior_residual, std::abs(r.value));
    rep.residuals.push_back(r);
  }
  rep.pass = std::all_of(rep.residuals.begin(), rep.residuals.end(), [](const AtomResidual& r) { return r.ok; });
  return rep;
}

MinimizeResult minimize_k(const MixtureSpec& spec, int k, const OptimizerOptions& opts, const QuadratureConfig& quad,
                          const std::vector<DiscreteMeasure>& warm_starts) {
  if (k < 1) throw ValidationError("minimize_k: k must be >= 1");
  opts.validate();
  quad.validate();
  Objective f(spec, quad);

  struct Candidate {
    Atoms atoms;
    double value;
  };
  std::vector<Candidate> candidates;
  std::vector<Atoms> starts;

  const double dirac_q = best_dirac_location(f);
  const Atoms dirac{{dirac_q}, {1.0}};
  candidates.push_back({dirac, f.atoms(dirac)});
  starts.push_back(pad_atoms(dirac, k));
  for (const DiscreteMeasure& w : warm_starts) {
    if (static_cast<int>(w.size()) > k) continue;
    const Atoms a = to_atoms(w);
    candidates.push_back({a, f.atoms(a)});
    starts.push_back(pad_atoms(a, k));
  }
  for (int r = static_cast<int>(starts.size()); r < opts.restarts; ++r) {
    const CounterStream rng(derive_key(opts.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r)));
    Atoms a;
    for (int l = 0; l < k; ++l) a.q.push_back(rng.uniform(l));
    for (int l = 0; l + 1 < k; ++l) a.m.push_back(rng.uniform(k + l));
    std::sort(a.q.begin(), a.q.end());
    std::sort(a.m.begin(), a.m.end());
    a.m.push_back(1.0);
    starts.push_back(a);
  }
  if (k >= 2) {
    const Atoms two = best_two_atom(f);
    candidates.push_back({two, f.atoms(two)});
    starts.push_back(pad_atoms(two, k));
  }

  bool converged = true;
  for (const Atoms& s : starts) {
    LocalResult res;
    if (opts.strategy == SearchStrategy::simplex) {
      res = nelder_mead(f, k, encode(s), opts.max_iters, std::max(opts.value_tol, 1e-10));
      res = bfgs_polish(f, k, res, 200, opts.value_tol);
    } else {
      res = projected_gradient(f, k, s, opts.max_iters, opts.value_tol);
    }
    converged = converged && res.converged;
    const Atoms a = decode(res.x, k);
    validate_atoms(a.q, a.m);
    candidates.push_back({a, res.value});
  }

  std::vector<std::pair<DiscreteMeasure, double>> finals;
  for (Candidate& c : candidates) {
    double v = c.value;
    const Atoms a = simplify(f, c.atoms, v);
    finals.emplace_back(DiscreteMeasure::make(a.q, a.m), v);
  }
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& fv : finals) best_value = std::min(best_value, fv.second);
  std::vector<std::pair<DiscreteMeasure, double>> ties;
  for (const auto& fv : finals) {
    if (fv.second <= best_value + opts.tie_tol) ties.push_back(fv);
  }
  std::sort(ties.begin(), ties.end(), [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });

  MinimizeResult out;
  out.measure = ties.front().first;
  for (std::size_t i = 1; i < ties.size(); ++i) {
    bool distinct = l1_distance(ties[i].first, out.measure) > kDistinctL1;
    for (const DiscreteMeasure& alt : out.alternatives) {
      distinct = distinct && l1_distance(ties[i].first, alt) > kDistinctL1;
    }
    if (distinct) out.alternatives.push_back(ties[i].first);
  }
  out.value = evaluate(spec, out.measure, quad);
  out.converged = converged;
  out.certificate = stationarity_certificate(spec, out.measure, quad, opts.stationarity_tol);
  out.evaluations = f.evaluations;
  return out;
}

std::pair<std::vector<double>, std::vector<double>> insert_atoms(const DiscreteMeasure& m, int k) {
  Atoms a = pad_atoms(to_atoms(m), k);
  return {std::move(a.q), std::move(a.m)};
}

DiscreteMeasure split_atom(const DiscreteMeasure& m, std::size_t l) {
  if (l >= m.size()) throw ValidationError("split_atom: atom index out of range");
  constexpr double kSplitOffset = 0.02;
  std::vector<double> qs(m.q().begin(), m.q().end());
  std::vector<double> ms(m.m().begin(), m.m().end());
  const double lower = l == 0 ? 0.0 : qs[l - 1];
  const double upper = l + 1 == qs.size() ? 1.0 : qs[l + 1];
  const double below = l == 0 ? 0.0 : ms[l - 1];
  const double a = std::max(lower + 0.25 * (qs[l] - lower), qs[l] - kSplitOffset);
  const double b = std::min(upper - 0.25 * (upper - qs[l]), qs[l] + kSplitOffset);
  qs[l] = b;
  qs.insert(qs.begin() + l, a);
  ms.insert(ms.begin() + l, 0.5 * (below + ms[l]));
  return DiscreteMeasure::make(qs, ms);
}

bool LadderReport::converged() const {
  return std::all_of(levels.begin(), levels.end(), [](const LadderLevel& l) { return l.converged; });
}

LadderReport minimize_ladder(const MixtureSpec& spec, int k_max, const OptimizerOptions& opts,
                             const QuadratureConfig& quad, const std::vector<DiscreteMeasure>& warm_starts) {
  if (k_max < 1) throw ValidationError("minimize_ladder: k_max must be >= 1");
  LadderReport rep;
  for (int k = 1; k <= k_max; ++k) {
    std::vector<DiscreteMeasure> warm;
    if (!rep.levels.empty()) {
      const DiscreteMeasure& prev = rep.levels.back().measure;
      warm.push_back(prev);
      if (static_cast<int>(prev.size()) < k) {
        const auto inserted = insert_atoms(prev, static_cast<int>(prev.size()) + 1);
        warm.push_back(DiscreteMeasure::make(inserted.first, inserted.second));
        for (std::size_t l = 0; l < prev.size(); ++l) warm.push_back(split_atom(prev, l));
      }
    }
    for (const DiscreteMeasure& w : warm_starts) {
      if (static_cast<int>(w.size()) <= k) warm.push_back(w);
    }
    const MinimizeResult r = minimize_k(spec, k, opts, quad, warm);
    LadderLevel level;
    level.k = k;
    level.measure = r.measure;
    level.value = r.value.value;
    level.stationarity_max_residual = r.certificate.max_interior_residual;
    level.certified = r.certificate.pass;
    level.converged = r.converged;
    level.alternatives = r.alternatives;
    if (!rep.levels.empty() && level.value > rep.levels.back().value) {
      // Defensive: the previous minimizer competes as a candidate, so this only
      // triggers through the tie window; keep the better one.
      const LadderLevel& prev = rep.levels.back();
      level.measure = prev.measure;
      level.value = prev.value;
      level.stationarity_max_residual = prev.stationarity_max_residual;
      level.certified = prev.certified;
    }
    rep.levels.push_back(level);
  }
  const double last = rep.levels.back().value;
  for (const LadderLevel& l : rep.levels) rep.eps.push_back(l.value - last);
  return rep;
}

ConvexityProbe convexity_probe(const MixtureSpec& spec, const DiscreteMeasure& m1, const DiscreteMeasure& m2,
                               const QuadratureConfig& quad, int points) {
  if (points < 3) throw ValidationError("convexity_probe: at least 3 points");
  ConvexityProbe p;
  for (int i = 0; i < points; ++i) {
    const double lambda = static_cast<double>(i) / (points - 1);
    p.lambdas.push_back(lambda);
    const DiscreteMeasure mm = mix(m1, m2, lambda);
    p.values.push_back(evaluate_value(spec, mm.q(), mm.m(), quad));
  }
  for (int i = 1; i + 1 < points; ++i) {
    const double mid = 0.5 * (p.values[i - 1] + p.values[i + 1]);
    p.max_violation = std::max(p.max_violation, p.values[i] - mid);
  }
  return p;
}

}  // namespace parisi
