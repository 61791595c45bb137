#pragma once

#include <span>
#include <vector>

#include "ainfty/filtration.hpp"

namespace ainfty {

/// Doob maximal function: per leaf, max_n |E(f | F_n)| along the leaf's
/// atom chain, n = 0..N.
std::vector<double> doob_maximal(const Filtration& f,
                                 std::span<const double> leaf_fn);

/// Tailed maximal function: per leaf, max_{m >= n} |E(f | F_m)|.
std::vector<double> tailed_maximal(const Filtration& f,
                                   std::span<const double> leaf_fn, int n);

/// Closed interval of admissible medians of a weight on one atom: every m
/// in [lo, hi] satisfies P(w > m | atom) <= 1/2 and P(w < m | atom) <= 1/2.
/// Both endpoints are attained weight values.
struct MedianInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Median intervals of w conditioned on each level-n atom.
std::vector<MedianInterval> median_function(const Filtration& f,
                                            const Weight& w, int n);

/// Smallest C with w_{n-1}/C <= w_n <= C * w_{n-1} for consecutive
/// conditional expectations, over all atoms and levels; 1 for depth 0.
double regularity_constant(const Filtration& f, const Weight& w);

/// Ratio max(w_n/w_{n-1}, w_{n-1}/w_n) at one level-n atom (n >= 1)
/// against its parent.
double regularity_ratio_at(const Filtration& f, const Weight& w, int n,
                           std::size_t atom_index);

/// First-crossing times of the renormalized weight w/w_n along the shifted
/// filtration. Row k holds, per leaf, the smallest offset m with
/// E(w/w_n | F_{n+m}) > 2^{kL}/2, or the sentinel `infinity` (= depth + 1)
/// if the threshold is never crossed. Row 0 is identically 0 and the last
/// row is identically infinite.
struct CrossingTimes {
  int base_level = 0;
  int step = 1;       // L
  int infinity = 0;   // sentinel value
  std::vector<std::vector<int>> tau;  // tau[k][leaf]
};

CrossingTimes crossing_times(const Filtration& f, const Weight& w, int n,
                             int L);

}  // namespace ainfty
