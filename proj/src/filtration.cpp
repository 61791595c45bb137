#include "ainfty/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <utility>

#include "json.hpp"

namespace ainfty {

namespace {

bool close_rel(double a, double b, double tol) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
  return std::fabs(a - b) <= tol * scale;
}

void check_level(const Filtration& f, int n) {
  if (n < 0 || n > f.depth()) {
    throw std::invalid_argument("level out of range: " + std::to_string(n));
  }
}

void check_leaf_fn(const Filtration& f, std::span<const double> leaf_fn) {
  if (leaf_fn.size() != f.leaf_count()) {
    throw std::invalid_argument("leaf function size mismatch");
  }
}

}  // namespace

struct FiltrationBuilder {
  Filtration f;
  int max_depth = 0;

  static int tree_depth(const Filtration::TreeNode& node) {
    int d = 0;
    for (const auto& c : node.children) d = std::max(d, 1 + tree_depth(c));
    return d;
  }

  // Appends the atom for `node` (and its carried-down copies if it is a
  // leaf above the bottom level) and recurses. Returns the atom's mass.
  double build(const Filtration::TreeNode& node, int level, std::size_t parent) {
    if (node.id.empty()) throw ParseError("node with empty id");
    if (node.children.empty()) {
      if (!(node.mass > 0.0) || !std::isfinite(node.mass)) {
        throw ParseError("leaf '" + node.id + "' has non-positive mass");
      }
      std::size_t leaf_idx = f.leaves_.size();
      f.leaves_.push_back({node.id, node.mass});
      std::size_t prev = parent;
      for (int m = level; m <= max_depth; ++m) {
        Atom a;
        a.id = node.id;
        a.level = m;
        a.first_leaf = leaf_idx;
        a.leaf_count = 1;
        a.mass = node.mass;
        a.parent = prev;
        std::size_t idx = f.levels_[m].size();
        if (m < max_depth) {
          a.child_begin = f.levels_[m + 1].size();
          a.child_end = a.child_begin + 1;
        }
        f.levels_[m].push_back(std::move(a));
        prev = idx;
      }
      return node.mass;
    }

    std::size_t idx = f.levels_[level].size();
    {
      Atom a;
      a.id = node.id;
      a.level = level;
      a.first_leaf = f.leaves_.size();
      a.parent = parent;
      f.levels_[level].push_back(std::move(a));
    }
    std::size_t child_begin = f.levels_[level + 1].size();
    double mass = 0.0;
    for (const auto& c : node.children) mass += build(c, level + 1, idx);
    Atom& a = f.levels_[level][idx];
    a.child_begin = child_begin;
    a.child_end = f.levels_[level + 1].size();
    a.leaf_count = f.leaves_.size() - a.first_leaf;
    a.mass = mass;
    if (node.mass >= 0.0 && !close_rel(node.mass, mass, kMassTol)) {
      throw ParseError("children do not partition parent '" + node.id + "'");
    }
    return mass;
  }

  void normalize() {
    double total = 0.0;
    for (const auto& leaf : f.leaves_) total += leaf.mass;
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw ParseError("total mass is not positive");
    }
    for (auto& leaf : f.leaves_) leaf.mass /= total;
    for (auto& lvl : f.levels_) {
      for (auto& a : lvl) {
        double m = 0.0;
        for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
          m += f.leaves_[i].mass;
        }
        a.mass = m;
      }
    }
  }

  void check_unique_ids() const {
    std::unordered_set<std::string_view> seen;
    for (const auto& leaf : f.leaves_) {
      if (!seen.insert(leaf.id).second) {
        throw ParseError("duplicate leaf id '" + leaf.id + "'");
      }
    }
  }

  // Replaces leaf masses in-place and recomputes atom masses as range sums.
  static void set_masses(Filtration& f, std::span<const double> leaf_masses) {
    for (std::size_t i = 0; i < f.leaves_.size(); ++i) {
      f.leaves_[i].mass = leaf_masses[i];
    }
    for (auto& lvl : f.levels_) {
      for (auto& a : lvl) {
        double m = 0.0;
        for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
          m += f.leaves_[i].mass;
        }
        a.mass = m;
      }
    }
  }
};

Filtration Filtration::dyadic(int depth) {
  if (depth < 0 || depth > 24) {
    throw std::invalid_argument("dyadic depth must be in [0, 24]");
  }
  Filtration f;
  f.depth_ = depth;
  std::size_t n_leaves = std::size_t{1} << depth;
  double leaf_mass = std::ldexp(1.0, -depth);
  f.leaves_.resize(n_leaves);
  for (std::size_t i = 0; i < n_leaves; ++i) {
    f.leaves_[i].id = std::to_string(depth) + ":" + std::to_string(i);
    f.leaves_[i].mass = leaf_mass;
  }
  f.levels_.resize(depth + 1);
  for (int n = 0; n <= depth; ++n) {
    std::size_t count = std::size_t{1} << n;
    std::size_t span = n_leaves >> n;
    f.levels_[n].resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      Atom& a = f.levels_[n][k];
      a.id = std::to_string(n) + ":" + std::to_string(k);
      a.level = n;
      a.first_leaf = k * span;
      a.leaf_count = span;
      a.mass = std::ldexp(1.0, -n);
      a.parent = (n == 0) ? Atom::npos : k / 2;
      if (n < depth) {
        a.child_begin = 2 * k;
        a.child_end = 2 * k + 2;
      }
    }
  }
  return f;
}

Filtration Filtration::from_tree(const TreeNode& root) {
  FiltrationBuilder b;
  b.max_depth = FiltrationBuilder::tree_depth(root);
  b.f.depth_ = b.max_depth;
  b.f.levels_.resize(b.max_depth + 1);
  b.build(root, 0, Atom::npos);
  b.check_unique_ids();
  b.normalize();
  return std::move(b.f);
}

std::span<const Atom> Filtration::level(int n) const {
  check_level(*this, n);
  return levels_[n];
}

const Atom& Filtration::atom(int n, std::size_t index) const {
  auto lvl = level(n);
  if (index >= lvl.size()) throw std::invalid_argument("atom index out of range");
  return lvl[index];
}

std::size_t Filtration::atom_of_leaf(int n, std::size_t leaf) const {
  check_level(*this, n);
  if (leaf >= leaves_.size()) throw std::invalid_argument("leaf index out of range");
  const auto& lvl = levels_[n];
  // Atoms are sorted by first_leaf; find the last atom starting at or before leaf.
  std::size_t lo = 0, hi = lvl.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi + 1) / 2;
    if (lvl[mid].first_leaf <= leaf) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

std::size_t Filtration::atom_index(int n, std::string_view id) const {
  for (std::size_t i = 0; i < levels_[n].size(); ++i) {
    if (levels_[n][i].id == id) return i;
  }
  throw std::invalid_argument("no atom '" + std::string(id) + "' at level " +
                              std::to_string(n));
}

std::size_t Filtration::leaf_index(std::string_view id) const {
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    if (leaves_[i].id == id) return i;
  }
  throw std::invalid_argument("no leaf '" + std::string(id) + "'");
}

void validate_weight(const Filtration& f, const Weight& w) {
  if (w.values.size() != f.leaf_count()) {
    throw std::invalid_argument("weight '" + w.name + "' size mismatch");
  }
  for (double v : w.values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("weight '" + w.name + "' has non-positive value");
    }
  }
}

double expectation(const Filtration& f, std::span<const double> leaf_fn) {
  check_leaf_fn(f, leaf_fn);
  double s = 0.0;
  for (std::size_t i = 0; i < leaf_fn.size(); ++i) {
    s += leaf_fn[i] * f.leaves()[i].mass;
  }
  return s;
}

Weight normalized(const Filtration& f, Weight w) {
  validate_weight(f, w);
  double total = expectation(f, w.values);
  for (double& v : w.values) v /= total;
  w.normalized = true;
  return w;
}

LevelFunction cond_exp(const Filtration& f, std::span<const double> leaf_fn,
                       int level) {
  check_level(f, level);
  check_leaf_fn(f, leaf_fn);
  auto atoms = f.level(level);
  LevelFunction out{level, std::vector<double>(atoms.size())};
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Atom& a = atoms[k];
    double s = 0.0;
    for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
      s += leaf_fn[i] * f.leaves()[i].mass;
    }
    out.values[k] = s / a.mass;
  }
  return out;
}

LevelFunction weighted_cond_exp(const Filtration& f, const Weight& w,
                                std::span<const double> leaf_fn, int level) {
  check_level(f, level);
  check_leaf_fn(f, leaf_fn);
  validate_weight(f, w);
  auto atoms = f.level(level);
  LevelFunction out{level, std::vector<double>(atoms.size())};
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Atom& a = atoms[k];
    double sw = 0.0;
    double s = 0.0;
    for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
      double wm = w.values[i] * f.leaves()[i].mass;
      sw += leaf_fn[i] * wm;
      s += wm;
    }
    out.values[k] = sw / s;
  }
  return out;
}

std::vector<double> to_leaf_function(const Filtration& f,
                                     const LevelFunction& g) {
  check_level(f, g.level);
  auto atoms = f.level(g.level);
  if (g.values.size() != atoms.size()) {
    throw std::invalid_argument("level function size mismatch");
  }
  std::vector<double> out(f.leaf_count());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Atom& a = atoms[k];
    for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
      out[i] = g.values[k];
    }
  }
  return out;
}

SwappedSpace swap_measure(const Filtration& f, const Weight& w) {
  validate_weight(f, w);
  double z = expectation(f, w.values);

  Filtration g = f;  // same tree; masses replaced below
  std::vector<double> masses(f.leaf_count());
  for (std::size_t i = 0; i < masses.size(); ++i) {
    masses[i] = w.values[i] * f.leaves()[i].mass / z;
  }
  FiltrationBuilder::set_masses(g, masses);

  Weight rw;
  rw.name = w.name + "^";
  rw.values.resize(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    rw.values[i] = z / w.values[i];
  }
  rw.normalized = true;
  return SwappedSpace{std::move(g), std::move(rw)};
}

namespace {

using nlohmann::json;

double parse_positive(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + " must be a number");
  double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ParseError(what + " must be positive and finite");
  }
  return x;
}

Filtration::TreeNode parse_node(const json& j) {
  if (!j.is_object()) throw ParseError("tree node must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "id" && key != "mass" && key != "children") {
      throw ParseError("unknown tree node key '" + key + "'");
    }
  }
  if (!j.contains("id") || !j.at("id").is_string()) {
    throw ParseError("tree node missing string id");
  }
  Filtration::TreeNode node;
  node.id = j.at("id").get<std::string>();
  if (j.contains("children")) {
    const json& kids = j.at("children");
    if (!kids.is_array() || kids.empty()) {
      throw ParseError("children of '" + node.id + "' must be a non-empty array");
    }
    for (const auto& c : kids) node.children.push_back(parse_node(c));
    if (j.contains("mass")) {
      node.mass = parse_positive(j.at("mass"), "mass of '" + node.id + "'");
    }
  } else {
    if (!j.contains("mass")) {
      throw ParseError("leaf '" + node.id + "' missing mass");
    }
    node.mass = parse_positive(j.at("mass"), "mass of '" + node.id + "'");
  }
  return node;
}

std::vector<Weight> parse_dyadic_weights(const json& j, std::size_t n_leaves) {
  std::vector<Weight> out;
  if (!j.is_object()) throw ParseError("weights must be an object");
  for (const auto& [name, arr] : j.items()) {
    if (!arr.is_array() || arr.size() != n_leaves) {
      throw ParseError("weight '" + name + "' must be an array of " +
                       std::to_string(n_leaves) + " values");
    }
    Weight w;
    w.name = name;
    w.values.reserve(n_leaves);
    for (const auto& v : arr) {
      w.values.push_back(parse_positive(v, "weight '" + name + "'"));
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<Weight> parse_tree_weights(const json& j, const Filtration& f) {
  std::vector<Weight> out;
  if (!j.is_object()) throw ParseError("weights must be an object");
  for (const auto& [name, obj] : j.items()) {
    if (!obj.is_object()) {
      throw ParseError("weight '" + name + "' must map leaf ids to values");
    }
    Weight w;
    w.name = name;
    w.values.assign(f.leaf_count(), -1.0);
    for (const auto& [leaf_id, v] : obj.items()) {
      std::size_t idx;
      try {
        idx = f.leaf_index(leaf_id);
      } catch (const std::invalid_argument&) {
        throw ParseError("weight '" + name + "' refers to unknown leaf '" +
                         leaf_id + "'");
      }
      w.values[idx] = parse_positive(v, "weight '" + name + "'");
    }
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      if (w.values[i] < 0.0) {
        throw ParseError("weight '" + name + "' missing value for leaf '" +
                         f.leaves()[i].id + "'");
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

ParsedDocument parse_filtration(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document must be an object");

  if (doc.contains("dyadic")) {
    for (const auto& [key, _] : doc.items()) {
      if (key != "dyadic") throw ParseError("unknown document key '" + key + "'");
    }
    const json& d = doc.at("dyadic");
    if (!d.is_object() || !d.contains("depth") ||
        !d.at("depth").is_number_integer()) {
      throw ParseError("dyadic form requires an integer depth");
    }
    for (const auto& [key, _] : d.items()) {
      if (key != "depth" && key != "weights") {
        throw ParseError("unknown dyadic key '" + key + "'");
      }
    }
    int depth = d.at("depth").get<int>();
    if (depth < 0 || depth > 24) {
      throw ParseError("dyadic depth must be in [0, 24]");
    }
    ParsedDocument out{Filtration::dyadic(depth), {}};
    if (d.contains("weights")) {
      out.weights = parse_dyadic_weights(d.at("weights"), out.filtration.leaf_count());
    }
    return out;
  }

  if (doc.contains("tree")) {
    for (const auto& [key, _] : doc.items()) {
      if (key != "tree" && key != "weights") {
        throw ParseError("unknown document key '" + key + "'");
      }
    }
    Filtration::TreeNode root = parse_node(doc.at("tree"));
    ParsedDocument out{Filtration::from_tree(root), {}};
    if (doc.contains("weights")) {
      out.weights = parse_tree_weights(doc.at("weights"), out.filtration);
    }
    return out;
  }

  throw ParseError("document must contain 'dyadic' or 'tree'");
}

}  // namespace ainfty
