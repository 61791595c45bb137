#pragma once

// Reference implementations the library is pinned against: direct
// definition evaluation with plain loops, and exhaustive subset enumeration
// for the concentration quantities. Nothing here shares code with the
// library internals; keep it slow and obvious.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ainfty/filtration.hpp"

namespace oracle {

using ainfty::Atom;
using ainfty::Filtration;
using ainfty::Weight;

inline double mean(const Filtration& f, const std::vector<double>& v,
                   const Atom& q) {
  double s = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    s += v[i] * f.leaves()[i].mass;
  }
  return s / q.mass;
}

inline double power_mean_raw(const Filtration& f, const Weight& w, double a,
                             const Atom& q) {
  double s = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    s += std::pow(w.values[i], a) * f.leaves()[i].mass;
  }
  return s / q.mass;
}

template <class PerAtom>
double sweep(const Filtration& f, PerAtom per_atom) {
  double best = -HUGE_VAL;
  for (int n = 0; n <= f.depth(); ++n) {
    for (const Atom& q : f.level(n)) best = std::max(best, per_atom(q));
  }
  return best;
}

inline double ap(const Filtration& f, const Weight& w, double p,
                 const Atom& q) {
  return mean(f, w.values, q) *
         std::pow(power_mean_raw(f, w, -1.0 / (p - 1.0), q), p - 1.0);
}

inline double rh(const Filtration& f, const Weight& w, double p,
                 const Atom& q) {
  return power_mean_raw(f, w, p, q) / std::pow(mean(f, w.values, q), p);
}

inline double aexp(const Filtration& f, const Weight& w, const Atom& q) {
  double mlog = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    mlog += std::log(w.values[i]) * f.leaves()[i].mass;
  }
  return mean(f, w.values, q) / std::exp(mlog / q.mass);
}

inline double asw(const Filtration& f, const Weight& w, double s,
                  const Atom& q) {
  return mean(f, w.values, q) /
         std::pow(power_mean_raw(f, w, s, q), 1.0 / s);
}

inline double acon(const Filtration& f, const Weight& w, double gamma,
                   const Atom& q) {
  double cut = gamma * mean(f, w.values, q);
  double m = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    if (w.values[i] <= cut) m += f.leaves()[i].mass;
  }
  return m / q.mass;
}

inline double alog(const Filtration& f, const Weight& w, const Atom& q) {
  double wn = mean(f, w.values, q);
  double s = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    double r = w.values[i] / wn;
    if (r > 1.0) s += r * std::log(r) * f.leaves()[i].mass;
  }
  return s / q.mass;
}

// Largest admissible median: the biggest attained value v with
// P(w > v | Q) <= 1/2 and P(w < v | Q) <= 1/2.
inline double median_max(const Filtration& f, const Weight& w,
                         const Atom& q) {
  double best = -HUGE_VAL;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    double v = w.values[i];
    double below = 0.0, above = 0.0;
    for (std::size_t j = q.first_leaf; j < q.first_leaf + q.leaf_count; ++j) {
      if (w.values[j] < v) below += f.leaves()[j].mass;
      if (w.values[j] > v) above += f.leaves()[j].mass;
    }
    if (below <= 0.5 * q.mass && above <= 0.5 * q.mass) {
      best = std::max(best, v);
    }
  }
  return best;
}

inline double amed(const Filtration& f, const Weight& w, const Atom& q) {
  return mean(f, w.values, q) / median_max(f, w, q);
}

// Tailed maximal of the weight from level n at one leaf, by walking the
// atom chain below.
inline double tail_max_at_leaf(const Filtration& f, const Weight& w, int n,
                               std::size_t leaf) {
  double best = -HUGE_VAL;
  for (int m = n; m <= f.depth(); ++m) {
    const Atom& a = f.atom(m, f.atom_of_leaf(m, leaf));
    best = std::max(best, mean(f, w.values, a));
  }
  return best;
}

inline double astar(const Filtration& f, const Weight& w, int n,
                    const Atom& q) {
  double s = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    s += tail_max_at_leaf(f, w, n, i) * f.leaves()[i].mass;
  }
  return s / q.mass / mean(f, w.values, q);
}

inline double astar_global(const Filtration& f, const Weight& w) {
  double best = -HUGE_VAL;
  for (int n = 0; n <= f.depth(); ++n) {
    for (const Atom& q : f.level(n)) best = std::max(best, astar(f, w, n, q));
  }
  return best;
}

// sup over lambda > 1 of E(r X_{r > lambda} | Q) / (lambda P(r > beta
// lambda | Q)), r = w / E(w|Q), evaluated at every breakpoint right-limit
// with direct predicate sums.
inline double alambda(const Filtration& f, const Weight& w, double beta,
                      const Atom& q) {
  double wn = mean(f, w.values, q);
  std::vector<double> cuts{1.0};
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    double r = w.values[i] / wn;
    if (r > 1.0) cuts.push_back(r);
    if (r / beta > 1.0) cuts.push_back(r / beta);
  }
  double best = 0.0;
  for (double lam : cuts) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
      double r = w.values[i] / wn;
      if (r > lam) num += r * f.leaves()[i].mass;
      if (r > beta * lam) den += f.leaves()[i].mass;
    }
    num /= q.mass;
    den /= q.mass;
    if (num > 0.0) best = std::max(best, num / (lam * den));
  }
  return best;
}

// --- exhaustive subset enumeration ---------------------------------------

struct Point {
  double t = 0.0;
  double h = 0.0;
};

// Every leaf subset of one atom, raw sums accumulated in ascending leaf
// order, Pareto-pruned, then normalized by the frontier's final point.
inline std::vector<Point> profile(const Filtration& f, const Weight& w,
                                  const Atom& q) {
  std::size_t m = q.leaf_count;
  std::vector<Point> raw;
  raw.reserve(std::size_t{1} << m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    Point p;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask >> j & 1) {
        double mu = f.leaves()[q.first_leaf + j].mass;
        p.t += mu;
        p.h += w.values[q.first_leaf + j] * mu;
      }
    }
    raw.push_back(p);
  }
  std::sort(raw.begin(), raw.end(), [](const Point& a, const Point& b) {
    return a.t < b.t || (a.t == b.t && a.h > b.h);
  });
  std::vector<Point> frontier;
  double best_h = -1.0;
  for (const Point& p : raw) {
    if (p.h > best_h) {
      frontier.push_back(p);
      best_h = p.h;
    }
  }
  const Point full = frontier.back();
  std::vector<Point> out;
  for (const Point& p : frontier) {
    double t = p.t / full.t;
    double h = p.h / full.h;
    if (!out.empty() && t == out.back().t) {
      out.back().h = std::max(out.back().h, h);
    } else if (out.empty() || h > out.back().h) {
      out.push_back({t, h});
    }
  }
  return out;
}

inline double profile_value_at(const std::vector<Point>& pts, double alpha) {
  double best = 0.0;
  for (const Point& p : pts) {
    if (p.t <= alpha) best = std::max(best, p.h);
  }
  return best;
}

inline double profile_power_ratio(const std::vector<Point>& pts, double eps) {
  double best = 0.0;
  for (const Point& p : pts) {
    if (p.t > 0.0) best = std::max(best, p.h / std::pow(p.t, eps));
  }
  return best;
}

inline double am(const Filtration& f, const Weight& w, double alpha,
                 const Atom& q) {
  return profile_value_at(profile(f, w, q), alpha);
}

inline double acf(const Filtration& f, const Weight& w, double eps,
                  const Atom& q) {
  return profile_power_ratio(profile(f, w, q), eps);
}

// max mu(A)/mu(Q) over subsets with w(A) <= alpha w(Q), straight from the
// original space (no measure swap involved).
inline double amhat_direct(const Filtration& f, const Weight& w, double alpha,
                           const Atom& q) {
  std::size_t m = q.leaf_count;
  double wq = 0.0, muq = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    wq += w.values[q.first_leaf + j] * f.leaves()[q.first_leaf + j].mass;
    muq += f.leaves()[q.first_leaf + j].mass;
  }
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double wa = 0.0, mua = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask >> j & 1) {
        wa += w.values[q.first_leaf + j] * f.leaves()[q.first_leaf + j].mass;
        mua += f.leaves()[q.first_leaf + j].mass;
      }
    }
    if (wa <= alpha * wq) best = std::max(best, mua / muq);
  }
  return best;
}

// --- maximal-function bounds ----------------------------------------------

inline double doob_max_at_leaf(const Filtration& f,
                               const std::vector<double>& values, int n,
                               std::size_t leaf) {
  double best = 0.0;
  for (int m = n; m <= f.depth(); ++m) {
    const Atom& a = f.atom(m, f.atom_of_leaf(m, leaf));
    best = std::max(best, std::fabs(mean(f, values, a)));
  }
  return best;
}

// mu(B and {M*_n f > lambda}) and (2/lambda) int_{B and {|f| > lambda/2}} |f|
inline std::pair<double, double> weak11_sides(const Filtration& f,
                                              const std::vector<double>& values,
                                              int n, const Atom& b,
                                              double lambda) {
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = b.first_leaf; i < b.first_leaf + b.leaf_count; ++i) {
    if (doob_max_at_leaf(f, values, n, i) > lambda) {
      lhs += f.leaves()[i].mass;
    }
    if (std::fabs(values[i]) > lambda / 2.0) {
      rhs += std::fabs(values[i]) * f.leaves()[i].mass;
    }
  }
  return {lhs, 2.0 / lambda * rhs};
}

// E(M*_n(f)^p | B) and (p/(p-1))^p E(|f|^p | B)
inline std::pair<double, double> doob_lp_sides(const Filtration& f,
                                               const std::vector<double>& values,
                                               int n, const Atom& b, double p) {
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = b.first_leaf; i < b.first_leaf + b.leaf_count; ++i) {
    lhs += std::pow(doob_max_at_leaf(f, values, n, i), p) *
           f.leaves()[i].mass;
    rhs += std::pow(std::fabs(values[i]), p) * f.leaves()[i].mass;
  }
  return {lhs / b.mass, std::pow(p / (p - 1.0), p) * rhs / b.mass};
}

// Smallest offset m with E(w|F_{n+m}) / E(w|F_n) > 2^{kL}/2 at one leaf,
// or `infinity` when never crossed.
inline int crossing_time(const Filtration& f, const Weight& w, int n, int L,
                         int k, std::size_t leaf, int infinity) {
  double base = mean(f, w.values, f.atom(n, f.atom_of_leaf(n, leaf)));
  double threshold = std::ldexp(1.0, k * L - 1);
  for (int m = n; m <= f.depth(); ++m) {
    const Atom& a = f.atom(m, f.atom_of_leaf(m, leaf));
    if (mean(f, w.values, a) / base > threshold) return m - n;
  }
  return infinity;
}

}  // namespace oracle
