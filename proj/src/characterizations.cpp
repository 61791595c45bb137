#include "ainfty/characterizations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "ainfty/operators.hpp"

namespace ainfty {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_open_unit(double v, const char* what) {
  if (!(v > 0.0) || !(v < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
  }
}

void require_gt_one(double v, const char* what) {
  if (!(v > 1.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be > 1");
  }
}

// Shared view of one (filtration, weight) pair. Moment accumulation happens
// in log space when the leaf values span more than kLogSpaceRatio, so that
// powers like w^q or w^{-1/(p-1)} neither overflow nor collapse to zero.
struct Ctx {
  const Filtration& f;
  const Weight& w;
  bool log_space = false;
  std::vector<double> logw;
  std::vector<double> logmu;

  Ctx(const Filtration& filtration, const Weight& weight)
      : f(filtration), w(weight) {
    validate_weight(f, w);
    double lo = kInf, hi = 0.0;
    for (double v : w.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    log_space = hi / lo > kLogSpaceRatio;
    if (log_space) {
      logw.resize(w.values.size());
      logmu.resize(w.values.size());
      for (std::size_t i = 0; i < w.values.size(); ++i) {
        logw[i] = std::log(w.values[i]);
        logmu[i] = std::log(f.leaves()[i].mass);
      }
    }
  }

  // E(w^a | atom), direct accumulation.
  double moment(double a, const Atom& q) const {
    double s = 0.0;
    if (a == 1.0) {
      for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
        s += w.values[i] * f.leaves()[i].mass;
      }
    } else {
      for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
        s += std::pow(w.values[i], a) * f.leaves()[i].mass;
      }
    }
    return s / q.mass;
  }

  // log E(w^a | atom) via log-sum-exp.
  double log_moment(double a, const Atom& q) const {
    double peak = -kInf;
    for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
      peak = std::max(peak, a * logw[i] + logmu[i]);
    }
    double s = 0.0;
    for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
      s += std::exp(a * logw[i] + logmu[i] - peak);
    }
    return peak + std::log(s) - std::log(q.mass);
  }

  // E(log w | atom).
  double mean_log(const Atom& q) const {
    double s = 0.0;
    for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
      s += std::log(w.values[i]) * f.leaves()[i].mass;
    }
    return s / q.mass;
  }
};

double ap_core(const Ctx& c, double p, const Atom& q) {
  double a = -1.0 / (p - 1.0);
  if (c.log_space) {
    return std::exp(c.log_moment(1.0, q) + (p - 1.0) * c.log_moment(a, q));
  }
  return c.moment(1.0, q) * std::pow(c.moment(a, q), p - 1.0);
}

double rh_core(const Ctx& c, double q_exp, const Atom& q) {
  if (c.log_space) {
    return std::exp(c.log_moment(q_exp, q) - q_exp * c.log_moment(1.0, q));
  }
  return c.moment(q_exp, q) / std::pow(c.moment(1.0, q), q_exp);
}

double aexp_core(const Ctx& c, const Atom& q) {
  if (c.log_space) {
    return std::exp(c.log_moment(1.0, q) - c.mean_log(q));
  }
  return c.moment(1.0, q) / std::exp(c.mean_log(q));
}

double asw_core(const Ctx& c, double s, const Atom& q) {
  if (c.log_space) {
    return std::exp(c.log_moment(1.0, q) - c.log_moment(s, q) / s);
  }
  return c.moment(1.0, q) / std::pow(c.moment(s, q), 1.0 / s);
}

double acon_core(const Ctx& c, double gamma, const Atom& q) {
  double threshold = gamma * c.moment(1.0, q);
  double m = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    if (c.w.values[i] <= threshold) m += c.f.leaves()[i].mass;
  }
  return m / q.mass;
}

double alog_core(const Ctx& c, const Atom& q) {
  double wn = c.moment(1.0, q);
  double s = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    double r = c.w.values[i] / wn;
    if (r > 1.0) s += r * std::log(r) * c.f.leaves()[i].mass;
  }
  return s / q.mass;
}

// sup over lambda > 1 of E_w(X_{r > lambda}|Q) / (lambda P(r > beta lambda|Q))
// with r = w / E(w|Q). Both step functions are right-continuous and the
// ratio decays like 1/lambda between breakpoints, so the supremum is the
// max of the right-limits at lambda = 1 and at each breakpoint.
std::vector<AlambdaBreakpoint> alambda_table(const Ctx& c, double beta,
                                             const Atom& q) {
  double wn = c.moment(1.0, q);
  std::size_t n = q.leaf_count;
  std::vector<std::pair<double, double>> rm(n);  // (ratio, mass) ascending
  for (std::size_t i = 0; i < n; ++i) {
    rm[i] = {c.w.values[q.first_leaf + i] / wn,
             c.f.leaves()[q.first_leaf + i].mass};
  }
  std::sort(rm.begin(), rm.end());

  // suffix sums: weighted mass (r * m) and plain mass above each index
  std::vector<double> suffix_wm(n + 1, 0.0), suffix_m(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    suffix_wm[i] = suffix_wm[i + 1] + rm[i].first * rm[i].second;
    suffix_m[i] = suffix_m[i + 1] + rm[i].second;
  }
  auto first_above = [&](double x) {
    return static_cast<std::size_t>(
        std::upper_bound(rm.begin(), rm.end(), x,
                         [](double v, const auto& e) { return v < e.first; }) -
        rm.begin());
  };

  std::vector<double> cuts;
  cuts.push_back(1.0);
  for (const auto& [r, m] : rm) {
    (void)m;
    if (r > 1.0) cuts.push_back(r);
    if (r / beta > 1.0) cuts.push_back(r / beta);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<AlambdaBreakpoint> out;
  out.reserve(cuts.size());
  for (double a : cuts) {
    AlambdaBreakpoint bp;
    bp.lambda = a;
    bp.tail_mean = suffix_wm[first_above(a)] / q.mass;
    bp.tail_prob = suffix_m[first_above(beta * a)] / q.mass;
    // empty upper tail: the bound is vacuous there, score it 0
    bp.ratio =
        bp.tail_mean > 0.0 ? bp.tail_mean / (a * bp.tail_prob) : 0.0;
    out.push_back(bp);
  }
  return out;
}

double alambda_core(const Ctx& c, double beta, const Atom& q) {
  double best = 0.0;
  for (const AlambdaBreakpoint& bp : alambda_table(c, beta, q)) {
    best = std::max(best, bp.ratio);
  }
  return best;
}

double amed_core(const Ctx& c, const MedianInterval& med, const Atom& q) {
  return c.moment(1.0, q) / med.hi;
}

// --- concentration profiles ---------------------------------------------

struct RawPoint {
  double t = 0.0;  // raw mass sum
  double h = 0.0;  // raw weighted-mass sum
};

// Merge-prune step: keeps, in t order, only points whose h strictly
// exceeds everything with smaller-or-equal t.
std::vector<RawPoint> prune(std::vector<RawPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const RawPoint& a, const RawPoint& b) {
    return a.t < b.t || (a.t == b.t && a.h > b.h);
  });
  std::vector<RawPoint> out;
  double best_h = -1.0;
  for (const RawPoint& p : pts) {
    if (p.h > best_h) {
      out.push_back(p);
      best_h = p.h;
    }
  }
  return out;
}

ConcentrationProfile finish_profile(std::vector<RawPoint> raw, int level,
                                    std::size_t atom_index,
                                    const std::string& atom_id, bool exact) {
  // The full-leaf-set point carries the totals; divide last so that raw
  // accumulation order matches plain left-to-right subset sums.
  const RawPoint& full = raw.back();
  std::vector<ProfilePoint> pts;
  pts.reserve(raw.size());
  for (const RawPoint& p : raw) {
    double t = p.t / full.t;
    double h = p.h / full.h;
    // Distinct raw sums can round to the same fraction; keep only the
    // jump points of alpha -> max h.
    if (!pts.empty() && t == pts.back().t) {
      pts.back().h = std::max(pts.back().h, h);
    } else if (pts.empty() || h > pts.back().h) {
      pts.push_back({t, h});
    }
  }
  ConcentrationProfile out;
  out.level = level;
  out.atom_index = atom_index;
  out.atom_id = atom_id;
  out.exact = exact;
  out.points = std::move(pts);
  return out;
}

ConcentrationProfile profile_exact(const Filtration& f, const Weight& w,
                                   int level, std::size_t atom_index) {
  const Atom& q = f.atom(level, atom_index);
  std::vector<RawPoint> pts{{0.0, 0.0}};
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    double dm = f.leaves()[i].mass;
    double dh = w.values[i] * dm;
    std::vector<RawPoint> next;
    next.reserve(2 * pts.size());
    for (const RawPoint& p : pts) next.push_back(p);
    for (const RawPoint& p : pts) next.push_back({p.t + dm, p.h + dh});
    pts = prune(std::move(next));
  }
  return finish_profile(std::move(pts), level, atom_index, q.id, true);
}

ConcentrationProfile profile_envelope(const Filtration& f, const Weight& w,
                                      int level, std::size_t atom_index) {
  const Atom& q = f.atom(level, atom_index);
  std::vector<std::size_t> order(q.leaf_count);
  std::iota(order.begin(), order.end(), q.first_leaf);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return w.values[a] > w.values[b] || (w.values[a] == w.values[b] && a < b);
  });
  std::vector<RawPoint> pts;
  pts.reserve(order.size() + 1);
  pts.push_back({0.0, 0.0});
  double t = 0.0, h = 0.0;
  for (std::size_t i : order) {
    double dm = f.leaves()[i].mass;
    t += dm;
    h += w.values[i] * dm;
    pts.push_back({t, h});
  }
  return finish_profile(std::move(pts), level, atom_index, q.id, false);
}

}  // namespace

ConcentrationProfile concentration_profile(const Filtration& f,
                                           const Weight& w, int level,
                                           std::size_t atom_index) {
  validate_weight(f, w);
  const Atom& q = f.atom(level, atom_index);
  if (q.leaf_count <= kExactProfileMaxLeaves) {
    return profile_exact(f, w, level, atom_index);
  }
  return profile_envelope(f, w, level, atom_index);
}

double ConcentrationProfile::value_at(double alpha) const {
  if (alpha >= points.back().t) return points.back().h;
  if (exact) {
    // Largest achievable mass fraction not above alpha.
    auto it = std::upper_bound(
        points.begin(), points.end(), alpha,
        [](double a, const ProfilePoint& p) { return a < p.t; });
    return std::prev(it)->h;
  }
  auto it = std::upper_bound(
      points.begin(), points.end(), alpha,
      [](double a, const ProfilePoint& p) { return a < p.t; });
  const ProfilePoint& hi = *it;
  const ProfilePoint& lo = *std::prev(it);
  return lo.h + (hi.h - lo.h) * (alpha - lo.t) / (hi.t - lo.t);
}

double ConcentrationProfile::max_power_ratio(double eps) const {
  double best = 0.0;
  for (const ProfilePoint& p : points) {
    if (p.t > 0.0) best = std::max(best, p.h / std::pow(p.t, eps));
  }
  if (!exact) {
    // The hull is linear between vertices; h/t^eps can peak inside a
    // segment, at t where b(1-eps) t = eps a for h = a + b t.
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const ProfilePoint& p0 = points[i];
      const ProfilePoint& p1 = points[i + 1];
      double b = (p1.h - p0.h) / (p1.t - p0.t);
      double a = p0.h - b * p0.t;
      if (a > 0.0 && b > 0.0) {
        double tc = eps * a / (b * (1.0 - eps));
        if (tc > p0.t && tc < p1.t) {
          best = std::max(best, (a + b * tc) / std::pow(tc, eps));
        }
      }
    }
  }
  return best;
}

ProfileSet ProfileSet::build(const Filtration& f, const Weight& w) {
  validate_weight(f, w);
  ProfileSet out;
  out.per_level_.resize(f.depth() + 1);
  for (int n = 0; n <= f.depth(); ++n) {
    auto atoms = f.level(n);
    out.per_level_[n].reserve(atoms.size());
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      out.per_level_[n].push_back(concentration_profile(f, w, n, k));
      if (!out.per_level_[n].back().exact) out.any_envelope_ = true;
    }
  }
  return out;
}

const ConcentrationProfile& ProfileSet::at(int level,
                                           std::size_t atom_index) const {
  if (level < 0 || level >= static_cast<int>(per_level_.size()) ||
      atom_index >= per_level_[level].size()) {
    throw std::invalid_argument("ProfileSet::at: no such atom");
  }
  return per_level_[level][atom_index];
}

// --- sweeps ----------------------------------------------------------------

namespace {

// Replaces `best` if strictly larger, breaking exact ties toward the
// earliest (level, atom) pair so parallel evaluation orders cannot matter.
void consider(Extremum& best, double v, int level, std::size_t k,
              const std::string& id, double param) {
  bool take = v > best.value ||
              (v == best.value &&
               (best.where.level < 0 || level < best.where.level ||
                (level == best.where.level && k < best.where.atom_index)));
  if (take) {
    best.value = v;
    best.where = Witness{level, k, id, param};
  }
}

template <typename PerAtom>
Extremum sweep_atoms(const Filtration& f, double param, PerAtom&& eval) {
  Extremum best{-kInf, {}};
  for (int n = 0; n <= f.depth(); ++n) {
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      consider(best, eval(n, atoms[k]), n, k, atoms[k].id, param);
    }
  }
  return best;
}

}  // namespace

Extremum ap_constant(const Filtration& f, const Weight& w, double p) {
  require_gt_one(p, "p");
  Ctx c(f, w);
  return sweep_atoms(f, p, [&](int, const Atom& q) { return ap_core(c, p, q); });
}

Extremum rh_constant(const Filtration& f, const Weight& w, double q) {
  require_gt_one(q, "q");
  Ctx c(f, w);
  return sweep_atoms(f, q,
                     [&](int, const Atom& a) { return rh_core(c, q, a); });
}

Extremum aexp_constant(const Filtration& f, const Weight& w) {
  Ctx c(f, w);
  return sweep_atoms(
      f, std::numeric_limits<double>::quiet_NaN(),
      [&](int, const Atom& q) { return aexp_core(c, q); });
}

Extremum asw_constant(const Filtration& f, const Weight& w, double s) {
  require_open_unit(s, "s");
  Ctx c(f, w);
  return sweep_atoms(f, s,
                     [&](int, const Atom& q) { return asw_core(c, s, q); });
}

Extremum acon_profile(const Filtration& f, const Weight& w, double gamma) {
  require_open_unit(gamma, "gamma");
  Ctx c(f, w);
  return sweep_atoms(
      f, gamma, [&](int, const Atom& q) { return acon_core(c, gamma, q); });
}

Extremum alog_constant(const Filtration& f, const Weight& w) {
  Ctx c(f, w);
  return sweep_atoms(
      f, std::numeric_limits<double>::quiet_NaN(),
      [&](int, const Atom& q) { return alog_core(c, q); });
}

Extremum amed_constant(const Filtration& f, const Weight& w) {
  Ctx c(f, w);
  Extremum best{-kInf, {}};
  for (int n = 0; n <= f.depth(); ++n) {
    auto meds = median_function(f, w, n);
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      consider(best, amed_core(c, meds[k], atoms[k]), n, k, atoms[k].id,
               std::numeric_limits<double>::quiet_NaN());
    }
  }
  return best;
}

Extremum astar_constant(const Filtration& f, const Weight& w) {
  Ctx c(f, w);
  std::vector<double> tail(f.leaf_count(), 0.0);
  std::vector<std::vector<double>> vals(f.depth() + 1);
  for (int n = f.depth(); n >= 0; --n) {
    auto atoms = f.level(n);
    LevelFunction wn = cond_exp(f, w.values, n);
    vals[n].resize(atoms.size());
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const Atom& q = atoms[k];
      for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
        tail[i] = std::max(tail[i], wn.values[k]);
      }
      double s = 0.0;
      for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
        s += tail[i] * f.leaves()[i].mass;
      }
      vals[n][k] = s / q.mass / wn.values[k];
    }
  }
  Extremum best{-kInf, {}};
  for (int n = 0; n <= f.depth(); ++n) {
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      consider(best, vals[n][k], n, k, atoms[k].id,
               std::numeric_limits<double>::quiet_NaN());
    }
  }
  return best;
}

Extremum alambda_constant(const Filtration& f, const Weight& w, double beta) {
  require_open_unit(beta, "beta");
  Ctx c(f, w);
  return sweep_atoms(f, beta, [&](int, const Atom& q) {
    return alambda_core(c, beta, q);
  });
}

Extremum am_profile(const Filtration& f, const ProfileSet& profiles,
                    double alpha) {
  require_open_unit(alpha, "alpha");
  Extremum best{-kInf, {}};
  for (int n = 0; n <= f.depth(); ++n) {
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      consider(best, profiles.at(n, k).value_at(alpha), n, k, atoms[k].id,
               alpha);
    }
  }
  return best;
}

Extremum acf_constant(const Filtration& f, const ProfileSet& profiles,
                      double eps) {
  require_open_unit(eps, "eps");
  Extremum best{-kInf, {}};
  for (int n = 0; n <= f.depth(); ++n) {
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      consider(best, profiles.at(n, k).max_power_ratio(eps), n, k,
               atoms[k].id, eps);
    }
  }
  return best;
}

Extremum am_profile(const Filtration& f, const Weight& w, double alpha) {
  return am_profile(f, ProfileSet::build(f, w), alpha);
}

Extremum am_hat_profile(const Filtration& f, const Weight& w, double alpha) {
  SwappedSpace s = swap_measure(f, w);
  Extremum out =
      am_profile(s.filtration, ProfileSet::build(s.filtration, s.weight),
                 alpha);
  return out;
}

Extremum acf_constant(const Filtration& f, const Weight& w, double eps) {
  return acf_constant(f, ProfileSet::build(f, w), eps);
}

// --- per-atom re-evaluation --------------------------------------------

double ap_at(const Filtration& f, const Weight& w, double p, int level,
             std::size_t atom_index) {
  require_gt_one(p, "p");
  Ctx c(f, w);
  return ap_core(c, p, f.atom(level, atom_index));
}

double rh_at(const Filtration& f, const Weight& w, double q, int level,
             std::size_t atom_index) {
  require_gt_one(q, "q");
  Ctx c(f, w);
  return rh_core(c, q, f.atom(level, atom_index));
}

double aexp_at(const Filtration& f, const Weight& w, int level,
               std::size_t atom_index) {
  Ctx c(f, w);
  return aexp_core(c, f.atom(level, atom_index));
}

double asw_at(const Filtration& f, const Weight& w, double s, int level,
              std::size_t atom_index) {
  require_open_unit(s, "s");
  Ctx c(f, w);
  return asw_core(c, s, f.atom(level, atom_index));
}

double acon_at(const Filtration& f, const Weight& w, double gamma, int level,
               std::size_t atom_index) {
  require_open_unit(gamma, "gamma");
  Ctx c(f, w);
  return acon_core(c, gamma, f.atom(level, atom_index));
}

double alog_at(const Filtration& f, const Weight& w, int level,
               std::size_t atom_index) {
  Ctx c(f, w);
  return alog_core(c, f.atom(level, atom_index));
}

double amed_at(const Filtration& f, const Weight& w, int level,
               std::size_t atom_index) {
  Ctx c(f, w);
  auto meds = median_function(f, w, level);
  return amed_core(c, meds[atom_index], f.atom(level, atom_index));
}

double astar_at(const Filtration& f, const Weight& w, int level,
                std::size_t atom_index) {
  Ctx c(f, w);
  const Atom& q = f.atom(level, atom_index);
  std::vector<double> tail(q.leaf_count, 0.0);
  double base = 0.0;
  for (int m = level; m <= f.depth(); ++m) {
    auto atoms = f.level(m);
    // Atoms at level m inside q form a contiguous index range.
    std::size_t lo = f.atom_of_leaf(m, q.first_leaf);
    for (std::size_t k = lo; k < atoms.size(); ++k) {
      const Atom& a = atoms[k];
      if (a.first_leaf >= q.first_leaf + q.leaf_count) break;
      double s = 0.0;
      for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
        s += w.values[i] * f.leaves()[i].mass;
      }
      double v = s / a.mass;
      if (m == level) base = v;
      for (std::size_t i = a.first_leaf; i < a.first_leaf + a.leaf_count; ++i) {
        tail[i - q.first_leaf] = std::max(tail[i - q.first_leaf], v);
      }
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i < q.leaf_count; ++i) {
    s += tail[i] * f.leaves()[q.first_leaf + i].mass;
  }
  return s / q.mass / base;
}

double alambda_at(const Filtration& f, const Weight& w, double beta, int level,
                  std::size_t atom_index) {
  require_open_unit(beta, "beta");
  Ctx c(f, w);
  return alambda_core(c, beta, f.atom(level, atom_index));
}

std::vector<AlambdaBreakpoint> alambda_breakpoints(const Filtration& f,
                                                   const Weight& w,
                                                   double beta, int level,
                                                   std::size_t atom_index) {
  require_open_unit(beta, "beta");
  Ctx c(f, w);
  return alambda_table(c, beta, f.atom(level, atom_index));
}

double am_at(const Filtration& f, const Weight& w, double alpha, int level,
             std::size_t atom_index) {
  require_open_unit(alpha, "alpha");
  return concentration_profile(f, w, level, atom_index).value_at(alpha);
}

double amhat_at(const Filtration& f, const Weight& w, double alpha, int level,
                std::size_t atom_index) {
  require_open_unit(alpha, "alpha");
  SwappedSpace s = swap_measure(f, w);
  return concentration_profile(s.filtration, s.weight, level, atom_index)
      .value_at(alpha);
}

double acf_at(const Filtration& f, const Weight& w, double eps, int level,
              std::size_t atom_index) {
  require_open_unit(eps, "eps");
  return concentration_profile(f, w, level, atom_index).max_power_ratio(eps);
}

// --- reports -----------------------------------------------------------

GridConfig GridConfig::defaults() {
  GridConfig g;
  g.p = {1.25, 1.5, 2.0, 3.0, 5.0};
  g.q = {1.25, 1.5, 2.0, 3.0, 5.0};
  g.s = {0.5, 0.2, 0.1, 0.01, 0.001};
  g.gamma = {0.05, 0.1, 0.25, 0.5, 0.75, 0.9};
  g.alpha = {0.05, 0.1, 0.25, 0.5, 0.75, 0.9};
  g.beta = {0.05, 0.1, 0.25, 0.5, 0.75, 0.9};
  g.eps = {0.1, 0.3, 0.5, 0.7, 0.9};
  return g;
}

AnalysisContext AnalysisContext::build(const Filtration& f, const Weight& w) {
  AnalysisContext ctx;
  ctx.filtration = &f;
  ctx.weight = w;
  ctx.profiles = ProfileSet::build(f, w);
  ctx.swapped = swap_measure(f, w);
  ctx.swapped_profiles =
      ProfileSet::build(ctx.swapped.filtration, ctx.swapped.weight);
  return ctx;
}

namespace {

ReportEntry to_entry(const Extremum& e) { return ReportEntry{e.value, e.where}; }

Extremum regularity_extremum(const Filtration& f, const Weight& w) {
  Extremum best{1.0, Witness{0, 0, f.atom(0, 0).id,
                             std::numeric_limits<double>::quiet_NaN()}};
  LevelFunction prev = cond_exp(f, w.values, 0);
  for (int n = 1; n <= f.depth(); ++n) {
    LevelFunction cur = cond_exp(f, w.values, n);
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      double p = prev.values[atoms[k].parent];
      double c = cur.values[k];
      consider(best, std::max(c / p, p / c), n, k, atoms[k].id,
               std::numeric_limits<double>::quiet_NaN());
    }
    prev = std::move(cur);
  }
  return best;
}

}  // namespace

ConstantReport full_report(const AnalysisContext& ctx,
                           const GridConfig& grids) {
  const Filtration& f = *ctx.filtration;
  const Weight& w = ctx.weight;
  ConstantReport r;
  r.weight = w.name;
  r.envelope =
      ctx.profiles.any_envelope() || ctx.swapped_profiles.any_envelope();
  r.regularity = to_entry(regularity_extremum(f, w));
  r.aexp = to_entry(aexp_constant(f, w));
  r.alog = to_entry(alog_constant(f, w));
  r.amed = to_entry(amed_constant(f, w));
  r.astar = to_entry(astar_constant(f, w));
  for (double p : grids.p) r.ap[p] = to_entry(ap_constant(f, w, p));
  for (double q : grids.q) r.rh[q] = to_entry(rh_constant(f, w, q));
  for (double s : grids.s) r.asw[s] = to_entry(asw_constant(f, w, s));
  for (double g : grids.gamma) r.acon[g] = to_entry(acon_profile(f, w, g));
  for (double a : grids.alpha) {
    r.am[a] = to_entry(am_profile(f, ctx.profiles, a));
    r.amhat[a] = to_entry(
        am_profile(ctx.swapped.filtration, ctx.swapped_profiles, a));
  }
  for (double e : grids.eps) {
    r.acf[e] = to_entry(acf_constant(f, ctx.profiles, e));
  }
  for (double b : grids.beta) {
    r.alambda[b] = to_entry(alambda_constant(f, w, b));
  }
  return r;
}

ConstantReport full_report(const Filtration& f, const Weight& w,
                           const GridConfig& grids) {
  return full_report(AnalysisContext::build(f, w), grids);
}

double reevaluate(const Filtration& f, const Weight& w, std::string_view key,
                  const Witness& witness) {
  int n = witness.level;
  std::size_t k = witness.atom_index;
  // Resolve by id if the index does not match.
  if (n < 0 || n > f.depth()) {
    throw std::invalid_argument("reevaluate: witness level out of range");
  }
  if (k >= f.level(n).size() || f.atom(n, k).id != witness.atom_id) {
    k = f.atom_index(n, witness.atom_id);
  }
  double p = witness.param;
  if (key == "regularity") {
    return n == 0 ? 1.0 : regularity_ratio_at(f, w, n, k);
  }
  if (key == "ap") return ap_at(f, w, p, n, k);
  if (key == "rh") return rh_at(f, w, p, n, k);
  if (key == "aexp") return aexp_at(f, w, n, k);
  if (key == "asw") return asw_at(f, w, p, n, k);
  if (key == "acon") return acon_at(f, w, p, n, k);
  if (key == "am") return am_at(f, w, p, n, k);
  if (key == "amhat") return amhat_at(f, w, p, n, k);
  if (key == "acf") return acf_at(f, w, p, n, k);
  if (key == "alambda") return alambda_at(f, w, p, n, k);
  if (key == "alog") return alog_at(f, w, n, k);
  if (key == "amed") return amed_at(f, w, n, k);
  if (key == "astar") return astar_at(f, w, n, k);
  throw std::invalid_argument("reevaluate: unknown key '" + std::string(key) +
                              "'");
}

}  // namespace ainfty
