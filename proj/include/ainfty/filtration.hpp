#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ainfty {

/// Relative tolerance for mass bookkeeping (partition checks, normalization).
inline constexpr double kMassTol = 1e-12;

/// Thrown on malformed input documents or invalid construction data.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Leaf {
  std::string id;
  double mass = 0.0;  // normalized, > 0, sums to 1 over all leaves
};

/// One cell of the partition at a given level. Leaves spanned by an atom
/// are contiguous in tree order, so an atom is a [first_leaf, first_leaf +
/// leaf_count) range.
struct Atom {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::string id;
  int level = 0;
  std::size_t first_leaf = 0;
  std::size_t leaf_count = 0;
  double mass = 0.0;
  std::size_t parent = npos;       // index into level-1 atom list
  std::size_t child_begin = npos;  // range into level+1 atom list
  std::size_t child_end = npos;
};

/// A function measurable at one level: one value per atom of that level.
struct LevelFunction {
  int level = 0;
  std::vector<double> values;  // indexed like Filtration::level(level)
};

/// Strictly positive leaf function used as a density. `values` is indexed
/// by leaf position; `normalized` records whether E(w) = 1 was enforced.
struct Weight {
  std::string name;
  std::vector<double> values;
  bool normalized = false;
};

/// Refining partition chain F_0 c F_1 c ... c F_N over a finite probability
/// space. Level 0 is the single root atom, level N the leaves. A level may
/// repeat the previous partition (refinement is not strict).
class Filtration {
 public:
  /// Node of an explicit construction tree. Leaves carry a mass; internal
  /// nodes may declare one, in which case it must match the sum of the
  /// masses below (relative tolerance kMassTol).
  struct TreeNode {
    std::string id;
    double mass = -1.0;  // < 0 means unset
    std::vector<TreeNode> children;
  };

  /// Uniform binary splitting of depth N (0 <= N <= 24): 2^N equal leaves.
  static Filtration dyadic(int depth);

  /// Builds a filtration from a rooted tree. Leaves sitting above the
  /// maximal depth are carried down as singleton atoms so that every level
  /// partitions the whole space. Raw masses are normalized to total 1.
  static Filtration from_tree(const TreeNode& root);

  int depth() const { return depth_; }
  std::size_t leaf_count() const { return leaves_.size(); }
  const std::vector<Leaf>& leaves() const { return leaves_; }

  std::span<const Atom> level(int n) const;
  const Atom& atom(int n, std::size_t index) const;
  std::size_t level_size(int n) const { return level(n).size(); }

  /// Index of the level-n atom containing the given leaf.
  std::size_t atom_of_leaf(int n, std::size_t leaf) const;

  /// Looks up an atom by id within a level; throws if absent.
  std::size_t atom_index(int n, std::string_view id) const;

  /// Looks up a leaf by id; throws if absent.
  std::size_t leaf_index(std::string_view id) const;

 private:
  friend struct FiltrationBuilder;

  int depth_ = 0;
  std::vector<Leaf> leaves_;
  std::vector<std::vector<Atom>> levels_;  // levels_[n], n = 0..depth_
};

/// Validates positivity and size of a weight against a filtration.
void validate_weight(const Filtration& f, const Weight& w);

/// Expectation of a leaf function: sum f * mass.
double expectation(const Filtration& f, std::span<const double> leaf_fn);

/// Returns the weight scaled so that E(w) = 1.
Weight normalized(const Filtration& f, Weight w);

/// Conditional expectation E(f | F_n): per level-n atom, the mass-weighted
/// average of f over the atom's leaves.
LevelFunction cond_exp(const Filtration& f, std::span<const double> leaf_fn,
                       int level);

/// Weighted conditional expectation E_w(f | F_n) = E(f w | F_n) / E(w | F_n).
LevelFunction weighted_cond_exp(const Filtration& f, const Weight& w,
                                std::span<const double> leaf_fn, int level);

/// Expands a level function to a leaf function (constant on each atom).
std::vector<double> to_leaf_function(const Filtration& f,
                                     const LevelFunction& g);

struct SwappedSpace {
  Filtration filtration;  // same tree, masses proportional to w * mass
  Weight weight;          // proportional to 1/w, normalized
};

/// Change of measure to w dmu, carrying the reciprocal weight. Applying the
/// swap twice recovers the original space up to normalization.
SwappedSpace swap_measure(const Filtration& f, const Weight& w);

struct ParsedDocument {
  Filtration filtration;
  std::vector<Weight> weights;
};

/// Parses an input document. Two forms are accepted:
///   {"dyadic": {"depth": N, "weights": {"name": [w_0, ...], ...}}}
///   {"tree": <node>, "weights": {"name": {"leaf_id": w, ...}, ...}}
/// where <node> is {"id": str, "children": [...]} or {"id": str, "mass": m}.
/// Throws ParseError with a descriptive message on malformed input.
ParsedDocument parse_filtration(std::string_view json_text);

}  // namespace ainfty
