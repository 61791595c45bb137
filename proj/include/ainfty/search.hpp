#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ainfty/characterizations.hpp"
#include "ainfty/filtration.hpp"

namespace ainfty {

/// splitmix64; the whole search stack draws from this one generator so
/// results are reproducible bit for bit across platforms.
struct SplitMix64 {
  std::uint64_t state = 0;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next_u64() { return gen_.next(); }
  /// uniform in [0, 1), 53 significant bits
  double uniform01() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return gen_.next() % n; }
  double gaussian();

 private:
  SplitMix64 gen_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

struct WeightFamily {
  enum class Kind { lognormal, geometric, spike };
  Kind kind = Kind::lognormal;
  double param = 1.0;  // sigma / ratio / height
};

/// Deterministic random weight, normalized to E(w) = 1. lognormal: iid
/// exp(sigma * gaussian) per leaf; geometric: leaf i gets ratio^i; spike:
/// one leaf (seeded choice) at `height`, the rest at 1.
Weight random_weight(const Filtration& f, const WeightFamily& family,
                     std::uint64_t seed);

/// One characterization estimator by name: ap, rh, asw, acon, am, amhat,
/// acf, alambda take a parameter; aexp, alog, amed, astar, sreg take none.
struct EstimatorRef {
  std::string name;
  double param = std::numeric_limits<double>::quiet_NaN();

  /// "name" or "name:param"
  static EstimatorRef parse(std::string_view text);
  std::string str() const;
};

double evaluate_estimator(const Filtration& f, const Weight& w,
                          const EstimatorRef& ref);

/// Ratio of one or two estimators: "ap:2", "ap:2/amed", "astar/alog".
struct ObjectiveSpec {
  EstimatorRef num;
  std::optional<EstimatorRef> den;

  static ObjectiveSpec parse(std::string_view text);
  std::string str() const;
};

double evaluate_objective(const Filtration& f, const Weight& w,
                          const ObjectiveSpec& objective);

/// Cap on one estimator: "amed<=1.5".
struct ConstraintSpec {
  EstimatorRef what;
  double cap = 0.0;

  static ConstraintSpec parse(std::string_view text);
  std::string str() const;
};

struct SearchSpec {
  int depth = 6;  // dyadic depth when no explicit filtration is supplied
  ObjectiveSpec objective;
  std::optional<ConstraintSpec> constraint;
  int budget = 2000;
  std::uint64_t seed = 0;
  double scale = 0.25;  // log-space proposal step
  int restarts = 1;
};

struct SearchResult {
  bool feasible = false;
  double best_objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> best_weight;  // leaf values, normalized; empty if infeasible
  std::vector<double> trace;        // best-so-far objective per evaluation
  ConstantReport report;            // all constants at the optimum
};

/// Simulated annealing over log leaf weights, starting from w == 1 (or
/// `start`). Proposals perturb one leaf; infeasible proposals are rejected.
/// With several restarts the best objective wins, ties resolved toward the
/// smallest derived restart seed. Deterministic for a fixed spec.
SearchResult optimize(const Filtration& f, const SearchSpec& spec);
SearchResult optimize(const Filtration& f, const SearchSpec& spec,
                      const Weight& start);

struct GapEntry {
  int depth = 0;
  std::uint64_t seed = 0;  // derived per-depth seed
  SearchResult result;
};

/// Runs optimize on dyadic filtrations of consecutive depths, each deeper
/// search warm-started by lifting the previous best weight (children
/// inherit the parent leaf's value).
std::vector<GapEntry> gap_scan(int depth_from, int depth_to,
                               const SearchSpec& spec_template);

}  // namespace ainfty
