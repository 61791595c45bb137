#include "ainfty/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ainfty/num_format.hpp"
#include "ainfty/operators.hpp"

namespace ainfty {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

double Rng::gaussian() {
  if (has_cache_) {
    has_cache_ = false;
    return cache_;
  }
  double u1;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * kPi * u2;
  cache_ = r * std::sin(angle);
  has_cache_ = true;
  return r * std::cos(angle);
}

Weight random_weight(const Filtration& f, const WeightFamily& family,
                     std::uint64_t seed) {
  std::size_t n = f.leaf_count();
  std::vector<double> v(n, 1.0);
  std::string name;
  switch (family.kind) {
    case WeightFamily::Kind::lognormal: {
      if (!(family.param >= 0.0) || !std::isfinite(family.param)) {
        throw std::invalid_argument("lognormal sigma must be >= 0");
      }
      Rng rng(seed);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::exp(family.param * rng.gaussian());
      }
      name = "lognormal(" + format_double(family.param) + ")";
      break;
    }
    case WeightFamily::Kind::geometric: {
      if (!(family.param > 0.0) || !std::isfinite(family.param)) {
        throw std::invalid_argument("geometric ratio must be positive");
      }
      double x = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = x;
        x *= family.param;
      }
      name = "geometric(" + format_double(family.param) + ")";
      break;
    }
    case WeightFamily::Kind::spike: {
      if (!(family.param > 0.0) || !std::isfinite(family.param)) {
        throw std::invalid_argument("spike height must be positive");
      }
      Rng rng(seed);
      v[rng.below(n)] = family.param;
      name = "spike(" + format_double(family.param) + ")";
      break;
    }
  }
  Weight w{name + "#" + std::to_string(seed), std::move(v), false};
  w = normalized(f, w);
  return w;
}

// --- estimator references ------------------------------------------------

namespace {

bool needs_param(std::string_view name) {
  return name == "ap" || name == "rh" || name == "asw" || name == "acon" ||
         name == "am" || name == "amhat" || name == "acf" ||
         name == "alambda";
}

bool known_estimator(std::string_view name) {
  return needs_param(name) || name == "aexp" || name == "alog" ||
         name == "amed" || name == "astar" || name == "sreg";
}

double parse_param(std::string_view text) {
  std::string s(text);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad estimator parameter '" + s + "'");
  }
}

}  // namespace

EstimatorRef EstimatorRef::parse(std::string_view text) {
  EstimatorRef ref;
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    ref.name = std::string(text);
  } else {
    ref.name = std::string(text.substr(0, colon));
    ref.param = parse_param(text.substr(colon + 1));
  }
  if (!known_estimator(ref.name)) {
    throw std::invalid_argument("unknown estimator '" + ref.name + "'");
  }
  if (needs_param(ref.name) && std::isnan(ref.param)) {
    throw std::invalid_argument("estimator '" + ref.name +
                                "' needs a parameter, e.g. '" + ref.name +
                                ":2'");
  }
  if (!needs_param(ref.name) && !std::isnan(ref.param)) {
    throw std::invalid_argument("estimator '" + ref.name +
                                "' takes no parameter");
  }
  return ref;
}

std::string EstimatorRef::str() const {
  if (std::isnan(param)) return name;
  return name + ":" + format_double(param);
}

double evaluate_estimator(const Filtration& f, const Weight& w,
                          const EstimatorRef& ref) {
  const std::string& n = ref.name;
  double p = ref.param;
  if (n == "ap") return ap_constant(f, w, p).value;
  if (n == "rh") return rh_constant(f, w, p).value;
  if (n == "asw") return asw_constant(f, w, p).value;
  if (n == "acon") return acon_profile(f, w, p).value;
  if (n == "am") return am_profile(f, w, p).value;
  if (n == "amhat") return am_hat_profile(f, w, p).value;
  if (n == "acf") return acf_constant(f, w, p).value;
  if (n == "alambda") return alambda_constant(f, w, p).value;
  if (n == "aexp") return aexp_constant(f, w).value;
  if (n == "alog") return alog_constant(f, w).value;
  if (n == "amed") return amed_constant(f, w).value;
  if (n == "astar") return astar_constant(f, w).value;
  if (n == "sreg") return regularity_constant(f, w);
  throw std::invalid_argument("unknown estimator '" + n + "'");
}

ObjectiveSpec ObjectiveSpec::parse(std::string_view text) {
  ObjectiveSpec spec;
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    spec.num = EstimatorRef::parse(text);
  } else {
    spec.num = EstimatorRef::parse(text.substr(0, slash));
    spec.den = EstimatorRef::parse(text.substr(slash + 1));
  }
  return spec;
}

std::string ObjectiveSpec::str() const {
  if (!den) return num.str();
  return num.str() + "/" + den->str();
}

double evaluate_objective(const Filtration& f, const Weight& w,
                          const ObjectiveSpec& objective) {
  double v = evaluate_estimator(f, w, objective.num);
  if (objective.den) v /= evaluate_estimator(f, w, *objective.den);
  return v;
}

ConstraintSpec ConstraintSpec::parse(std::string_view text) {
  auto pos = text.find("<=");
  if (pos == std::string_view::npos) {
    throw std::invalid_argument(
        "constraint must look like 'name[:param]<=value'");
  }
  ConstraintSpec spec;
  spec.what = EstimatorRef::parse(text.substr(0, pos));
  spec.cap = parse_param(text.substr(pos + 2));
  return spec;
}

std::string ConstraintSpec::str() const {
  return what.str() + "<=" + format_double(cap);
}

// --- annealing -----------------------------------------------------------

namespace {

struct Chain {
  bool feasible = false;
  double best_objective = kNan;
  std::vector<double> best_weight;
  std::vector<double> trace;
};

Weight make_weight(const Filtration& f, std::vector<double> values) {
  Weight w{"candidate", std::move(values), false};
  return normalized(f, w);
}

Chain anneal(const Filtration& f, const SearchSpec& spec,
             const std::vector<double>& start, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t n = f.leaf_count();

  // relative 1e-10 headroom so a warm start sitting on the cap is not
  // rejected over float noise
  auto feasible = [&](const Weight& w) {
    if (!spec.constraint) return true;
    double cap = spec.constraint->cap;
    return evaluate_estimator(f, w, spec.constraint->what) <=
           cap + 1e-10 * std::max(1.0, std::abs(cap));
  };

  Weight current = make_weight(f, start);
  bool current_ok = feasible(current);
  double current_obj =
      current_ok ? evaluate_objective(f, current, spec.objective) : kNan;

  Chain chain;
  chain.trace.reserve(spec.budget);
  if (current_ok) {
    chain.feasible = true;
    chain.best_objective = current_obj;
    chain.best_weight = current.values;
  }
  chain.trace.push_back(chain.best_objective);

  double t0 = std::max(current_ok ? 0.1 * std::abs(current_obj) : 0.0, 1e-300);
  double temperature = t0;
  for (int k = 1; k < spec.budget; ++k) {
    temperature *= 0.999;
    std::size_t leaf = rng.below(n);
    double bump = std::exp(spec.scale * rng.gaussian());

    std::vector<double> values = current.values;
    values[leaf] *= bump;
    bool usable = std::isfinite(values[leaf]) && values[leaf] > 0.0;
    if (usable) {
      Weight proposal = make_weight(f, std::move(values));
      if (feasible(proposal)) {
        double obj = evaluate_objective(f, proposal, spec.objective);
        bool accept;
        if (!current_ok) {
          accept = true;  // first feasible point
        } else {
          double delta = obj - current_obj;
          accept = delta >= 0.0 ||
                   rng.uniform01() < std::exp(delta / temperature);
        }
        if (accept) {
          current = std::move(proposal);
          current_obj = obj;
          current_ok = true;
          if (!chain.feasible || current_obj > chain.best_objective) {
            chain.feasible = true;
            chain.best_objective = current_obj;
            chain.best_weight = current.values;
          }
        }
      }
    }
    chain.trace.push_back(chain.best_objective);
  }
  return chain;
}

}  // namespace

SearchResult optimize(const Filtration& f, const SearchSpec& spec,
                      const Weight& start) {
  if (spec.budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (spec.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
    throw std::invalid_argument("proposal scale must be positive");
  }
  validate_weight(f, start);

  SplitMix64 seeder(spec.seed);
  Chain best;
  std::uint64_t best_seed = 0;
  for (int r = 0; r < spec.restarts; ++r) {
    std::uint64_t restart_seed = seeder.next();
    Chain c = anneal(f, spec, start.values, restart_seed);
    bool better;
    if (r == 0) {
      better = true;
    } else if (c.feasible != best.feasible) {
      better = c.feasible;
    } else if (c.feasible) {
      better = c.best_objective > best.best_objective ||
               (c.best_objective == best.best_objective &&
                restart_seed < best_seed);
    } else {
      better = false;
    }
    if (better) {
      best = std::move(c);
      best_seed = restart_seed;
    }
  }

  SearchResult out;
  out.feasible = best.feasible;
  out.best_objective = best.best_objective;
  out.trace = std::move(best.trace);
  if (best.feasible) {
    out.best_weight = best.best_weight;
    Weight w{"best", out.best_weight, true};
    out.report = full_report(f, w);
  }
  return out;
}

SearchResult optimize(const Filtration& f, const SearchSpec& spec) {
  Weight flat{"flat", std::vector<double>(f.leaf_count(), 1.0), true};
  return optimize(f, spec, flat);
}

std::vector<GapEntry> gap_scan(int depth_from, int depth_to,
                               const SearchSpec& spec_template) {
  if (depth_from < 0 || depth_to < depth_from) {
    throw std::invalid_argument("bad depth range");
  }
  SplitMix64 seeder(spec_template.seed);
  std::vector<GapEntry> out;
  std::vector<double> warm;
  for (int d = depth_from; d <= depth_to; ++d) {
    Filtration f = Filtration::dyadic(d);
    SearchSpec spec = spec_template;
    spec.depth = d;
    spec.seed = seeder.next();

    GapEntry entry;
    entry.depth = d;
    entry.seed = spec.seed;
    if (warm.empty()) {
      entry.result = optimize(f, spec);
    } else {
      Weight start{"warm", warm, false};
      start = normalized(f, start);
      entry.result = optimize(f, spec, start);
    }
    if (entry.result.feasible) {
      // lift: each leaf value carries to both children
      warm.clear();
      warm.reserve(entry.result.best_weight.size() * 2);
      for (double v : entry.result.best_weight) {
        warm.push_back(v);
        warm.push_back(v);
      }
    } else {
      warm.clear();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace ainfty
