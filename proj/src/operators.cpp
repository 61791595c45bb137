#include "ainfty/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ainfty {

namespace {

// max_{m in [n, N]} |E(f | F_m)| per leaf, by sweeping levels once.
std::vector<double> running_abs_max(const Filtration& f,
                                    std::span<const double> leaf_fn, int n) {
  std::vector<double> out(f.leaf_count(), 0.0);
  for (int m = n; m <= f.depth(); ++m) {
    LevelFunction fm = cond_exp(f, leaf_fn, m);
    auto atoms = f.level(m);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      double v = std::fabs(fm.values[k]);
      const Atom& a = atoms[k];
      for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
        out[i] = std::max(out[i], v);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> doob_maximal(const Filtration& f,
                                 std::span<const double> leaf_fn) {
  return running_abs_max(f, leaf_fn, 0);
}

std::vector<double> tailed_maximal(const Filtration& f,
                                   std::span<const double> leaf_fn, int n) {
  if (n < 0 || n > f.depth()) {
    throw std::invalid_argument("tailed_maximal: level out of range");
  }
  return running_abs_max(f, leaf_fn, n);
}

std::vector<MedianInterval> median_function(const Filtration& f,
                                            const Weight& w, int n) {
  validate_weight(f, w);
  auto atoms = f.level(n);
  std::vector<MedianInterval> out(atoms.size());
  std::vector<std::pair<double, double>> vm;  // (value, mass), sorted by value
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Atom& a = atoms[k];
    vm.clear();
    for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
      vm.emplace_back(w.values[i], f.leaves()[i].mass);
    }
    std::sort(vm.begin(), vm.end());

    const double half = 0.5 * a.mass * (1.0 + 1e-12);
    bool found = false;
    double lo = 0.0, hi = 0.0;
    double below = 0.0;  // mass strictly below the current value group
    std::size_t i = 0;
    while (i < vm.size()) {
      double v = vm[i].first;
      double group = 0.0;
      while (i < vm.size() && vm[i].first == v) {
        group += vm[i].second;
        ++i;
      }
      double above = a.mass - below - group;
      if (below <= half && above <= half) {
        if (!found) lo = v;
        hi = v;
        found = true;
      }
      below += group;
    }
    if (!found) {
      throw std::logic_error("median_function: no admissible median");
    }
    out[k] = MedianInterval{lo, hi};
  }
  return out;
}

double regularity_constant(const Filtration& f, const Weight& w) {
  validate_weight(f, w);
  double best = 1.0;
  LevelFunction prev = cond_exp(f, w.values, 0);
  for (int n = 1; n <= f.depth(); ++n) {
    LevelFunction cur = cond_exp(f, w.values, n);
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      double p = prev.values[atoms[k].parent];
      double c = cur.values[k];
      best = std::max(best, std::max(c / p, p / c));
    }
    prev = std::move(cur);
  }
  return best;
}

double regularity_ratio_at(const Filtration& f, const Weight& w, int n,
                           std::size_t atom_index) {
  if (n < 1 || n > f.depth()) {
    throw std::invalid_argument("regularity_ratio_at: level must be >= 1");
  }
  const Atom& a = f.atom(n, atom_index);
  const Atom& parent = f.atom(n - 1, a.parent);
  auto avg = [&](const Atom& q) {
    double s = 0.0;
    for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
      s += w.values[i] * f.leaves()[i].mass;
    }
    return s / q.mass;
  };
  double c = avg(a);
  double p = avg(parent);
  return std::max(c / p, p / c);
}

CrossingTimes crossing_times(const Filtration& f, const Weight& w, int n,
                             int L) {
  validate_weight(f, w);
  if (n < 0 || n > f.depth()) {
    throw std::invalid_argument("crossing_times: level out of range");
  }
  if (L < 1) throw std::invalid_argument("crossing_times: L must be >= 1");

  const int sentinel = f.depth() + 1;
  const std::size_t n_leaves = f.leaf_count();

  LevelFunction base = cond_exp(f, w.values, n);
  std::vector<double> base_leaf(n_leaves);
  {
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const Atom& a = atoms[k];
      for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
        base_leaf[i] = base.values[k];
      }
    }
  }

  // next_k[i]: smallest threshold index the leaf has not yet crossed.
  std::vector<int> next_k(n_leaves, 0);
  std::vector<std::vector<int>> rows;
  auto row_for = [&](int k) -> std::vector<int>& {
    while (static_cast<int>(rows.size()) <= k) {
      rows.emplace_back(n_leaves, sentinel);
    }
    return rows[k];
  };
  auto threshold = [L](int k) { return std::ldexp(1.0, k * L - 1); };

  for (int m = n; m <= f.depth(); ++m) {
    LevelFunction fm = cond_exp(f, w.values, m);
    auto atoms = f.level(m);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const Atom& a = atoms[k];
      for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
        double ratio = fm.values[k] / base_leaf[i];
        while (ratio > threshold(next_k[i])) {
          row_for(next_k[i])[i] = m - n;
          ++next_k[i];
        }
      }
    }
  }

  // Terminal all-infinite row.
  int max_k = 0;
  for (std::size_t i = 0; i < n_leaves; ++i) max_k = std::max(max_k, next_k[i]);
  row_for(max_k);

  CrossingTimes out;
  out.base_level = n;
  out.step = L;
  out.infinity = sentinel;
  out.tau = std::move(rows);
  return out;
}

}  // namespace ainfty
