#pragma once

#include <string>
#include <vector>

#include "ainfty/filtration.hpp"
#include "ainfty/search.hpp"

namespace helpers {

// depth-1 fixture: two equal-mass leaves, weight proportional to (1, 3)
inline ainfty::Filtration f2() { return ainfty::Filtration::dyadic(1); }

inline ainfty::Weight w13(const ainfty::Filtration& f) {
  return ainfty::normalized(f, ainfty::Weight{"W13", {1.0, 3.0}, false});
}

inline ainfty::Weight flat(const ainfty::Filtration& f) {
  return {"flat", std::vector<double>(f.leaf_count(), 1.0), true};
}

inline ainfty::Weight lognormal(const ainfty::Filtration& f, double sigma,
                                std::uint64_t seed) {
  return ainfty::random_weight(
      f, {ainfty::WeightFamily::Kind::lognormal, sigma}, seed);
}

// Deterministic irregular tree: branching 2-3, some branches stop early,
// leaf masses spread over (0.25, 2.25) before normalization.
inline ainfty::Filtration::TreeNode random_tree_node(ainfty::SplitMix64& rng,
                                                     int depth,
                                                     const std::string& id) {
  ainfty::Filtration::TreeNode node;
  node.id = id;
  bool stop = depth == 0 || (id.size() > 1 && rng.next() % 4 == 0);
  if (stop) {
    node.mass = 0.25 + static_cast<double>(rng.next() % 1024) / 512.0;
    return node;
  }
  int kids = 2 + static_cast<int>(rng.next() % 2);
  for (int c = 0; c < kids; ++c) {
    node.children.push_back(
        random_tree_node(rng, depth - 1, id + std::to_string(c)));
  }
  return node;
}

inline ainfty::Filtration random_tree(std::uint64_t seed, int max_depth) {
  ainfty::SplitMix64 rng(seed);
  return ainfty::Filtration::from_tree(random_tree_node(rng, max_depth, "r"));
}

// iid standard gaussians per leaf, optionally folded nonnegative
inline std::vector<double> random_function(const ainfty::Filtration& f,
                                           std::uint64_t seed, bool signed_fn) {
  ainfty::Rng rng(seed);
  std::vector<double> v(f.leaf_count());
  for (double& x : v) {
    x = rng.gaussian();
    if (!signed_fn) x = std::fabs(x);
  }
  return v;
}

}  // namespace helpers
