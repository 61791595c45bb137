#include "ainfty/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "ainfty/num_format.hpp"
#include "ainfty/operators.hpp"

namespace ainfty {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kExactTol = 1e-12;
constexpr double kWitnessTol = 1e-10;

double rel_slack(double lhs, double rhs) {
  if (std::isinf(rhs)) return std::isinf(lhs) ? kNan : kInf;
  return (rhs - lhs) / std::max(1.0, std::abs(rhs));
}

// Collects `lhs <= rhs` instances of one check, keeping the worst slack
// and its description.
struct SlackAcc {
  double worst = kInf;
  std::string where;
  std::size_t asserted = 0;

  void add(double lhs, double rhs, std::string note) {
    double s = rel_slack(lhs, rhs);
    if (std::isnan(s)) return;
    ++asserted;
    if (s < worst) {
      worst = s;
      where = std::move(note);
    }
  }

  CheckResult finish(std::string check, std::string weight,
                     double tol) const {
    CheckResult r;
    r.check = std::move(check);
    r.weight = std::move(weight);
    if (asserted == 0) {
      r.passed = true;
      r.worst_slack = kNan;
      r.witness = "vacuous: no instance asserted";
    } else {
      r.passed = worst >= -tol;
      r.worst_slack = worst;
      r.witness = where;
    }
    return r;
  }
};

void check_leaf_values(const Filtration& f, const std::vector<double>& v) {
  if (v.size() != f.leaf_count()) {
    throw std::invalid_argument("function has wrong number of leaf values");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("function values must be finite");
    }
  }
}

// Per-leaf |f| and M*_n f over one atom, with sorted suffix tables for
// fast "mass above" / "weighted mass above" queries.
struct TailTables {
  std::vector<std::pair<double, double>> m;   // (M* value, mass) ascending
  std::vector<std::pair<double, double>> a;   // (|f| value, |f|*mass) ascending
  std::vector<double> m_suffix;               // suffix mass over m
  std::vector<double> a_suffix;               // suffix weighted mass over a

  TailTables(const Filtration& f, const std::vector<double>& abs_f,
             const std::vector<double>& mstar, const Atom& q) {
    m.reserve(q.leaf_count);
    a.reserve(q.leaf_count);
    for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
      double mu = f.leaves()[i].mass;
      m.emplace_back(mstar[i], mu);
      a.emplace_back(abs_f[i], abs_f[i] * mu);
    }
    std::sort(m.begin(), m.end());
    std::sort(a.begin(), a.end());
    m_suffix.assign(m.size() + 1, 0.0);
    a_suffix.assign(a.size() + 1, 0.0);
    for (std::size_t i = m.size(); i-- > 0;) {
      m_suffix[i] = m_suffix[i + 1] + m[i].second;
      a_suffix[i] = a_suffix[i + 1] + a[i].second;
    }
  }

  static std::size_t above(const std::vector<std::pair<double, double>>& v,
                           double x, bool strict) {
    auto cmp = [](double val, const std::pair<double, double>& e) {
      return val < e.first;
    };
    auto it = strict ? std::upper_bound(v.begin(), v.end(), x, cmp)
                     : std::lower_bound(v.begin(), v.end(), x,
                                        [](const auto& e, double val) {
                                          return e.first < val;
                                        });
    return static_cast<std::size_t>(it - v.begin());
  }

  // mu{M* > x} (strict) or mu{M* >= x}
  double mass_above(double x, bool strict) const {
    return m_suffix[above(m, x, strict)];
  }
  // int over {|f| > x} (or >=) of |f| dmu
  double weighted_above(double x, bool strict) const {
    return a_suffix[above(a, x, strict)];
  }
};

}  // namespace

CheckResult check_lemma_slimit(const Filtration& f, const Weight& w,
                               std::span<const double> s_grid) {
  validate_weight(f, w);
  std::vector<double> grid(s_grid.begin(), s_grid.end());
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw std::invalid_argument("empty s grid");

  double aexp = aexp_constant(f, w).value;
  std::vector<double> vals;
  vals.reserve(grid.size());
  for (double s : grid) vals.push_back(asw_constant(f, w, s).value);

  SlackAcc acc;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    acc.add(vals[i], vals[i + 1],
            "monotonicity at s=" + format_double(grid[i + 1]));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    acc.add(vals[i], aexp, "upper bound at s=" + format_double(grid[i]));
  }

  // Gap bound at the smallest s from the bounded-increment estimate:
  // aexp <= asw(s) * exp(s R^2 / 8) where R = log(max w / min w).
  double lo = kInf, hi = 0.0;
  for (double v : w.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double r = std::log(hi / lo);
  double s_min = grid.back();
  double gap = (aexp - vals.back()) / vals.back();
  acc.add(gap, std::expm1(s_min * r * r / 8.0),
          "limit gap at s=" + format_double(s_min));
  return acc.finish("asw_limit", w.name, kExactTol);
}

std::pair<double, double> doob_local_sides(const Filtration& f,
                                           const std::vector<double>& values,
                                           int level, std::size_t atom_index,
                                           double lambda) {
  check_leaf_values(f, values);
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  std::vector<double> abs_f(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) abs_f[i] = std::abs(values[i]);
  std::vector<double> mstar = tailed_maximal(f, values, level);
  TailTables t(f, abs_f, mstar, f.atom(level, atom_index));
  return {t.mass_above(lambda, true),
          2.0 / lambda * t.weighted_above(lambda / 2.0, true)};
}

CheckResult check_doob_local(const Filtration& f,
                             const std::vector<double>& values,
                             std::string_view name, double tol_rel) {
  check_leaf_values(f, values);
  std::vector<double> abs_f(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) abs_f[i] = std::abs(values[i]);

  SlackAcc acc;
  for (int n = 0; n <= f.depth(); ++n) {
    std::vector<double> mstar = tailed_maximal(f, values, n);
    auto atoms = f.level(n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      TailTables t(f, abs_f, mstar, atoms[k]);
      std::vector<double> cuts;
      for (const auto& [v, mu] : t.m) {
        (void)mu;
        if (v > 0.0) cuts.push_back(v);
      }
      for (const auto& [v, vm] : t.a) {
        (void)vm;
        if (v > 0.0) cuts.push_back(2.0 * v);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (double b : cuts) {
        std::string at = "level " + std::to_string(n) + " atom " +
                         atoms[k].id + " lambda=" + format_double(b);
        acc.add(t.mass_above(b, true),
                2.0 / b * t.weighted_above(b / 2.0, true), at);
        acc.add(t.mass_above(b, false),
                2.0 / b * t.weighted_above(b / 2.0, false),
                at + " (left limit)");
      }
    }
  }
  return acc.finish("doob_local", std::string(name), tol_rel);
}

std::pair<double, double> conditional_doob_sides(
    const Filtration& f, const std::vector<double>& values, int level,
    std::size_t atom_index, double p) {
  check_leaf_values(f, values);
  if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
  std::vector<double> mstar = tailed_maximal(f, values, level);
  const Atom& q = f.atom(level, atom_index);
  double lhs = 0.0, moment = 0.0;
  for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
    double mu = f.leaves()[i].mass;
    lhs += std::pow(mstar[i], p) * mu;
    moment += std::pow(std::abs(values[i]), p) * mu;
  }
  double c = std::pow(p / (p - 1.0), p);
  return {lhs / q.mass, c * moment / q.mass};
}

CheckResult check_conditional_doob(const Filtration& f,
                                   const std::vector<double>& values,
                                   std::string_view name,
                                   std::span<const double> p_grid,
                                   double tol_rel) {
  check_leaf_values(f, values);
  SlackAcc acc;
  for (double p : p_grid) {
    if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
    double c = std::pow(p / (p - 1.0), p);
    for (int n = 0; n <= f.depth(); ++n) {
      std::vector<double> mstar = tailed_maximal(f, values, n);
      auto atoms = f.level(n);
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        const Atom& q = atoms[k];
        double lhs = 0.0, moment = 0.0;
        for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count;
             ++i) {
          double mu = f.leaves()[i].mass;
          lhs += std::pow(mstar[i], p) * mu;
          moment += std::pow(std::abs(values[i]), p) * mu;
        }
        acc.add(lhs / q.mass, c * moment / q.mass,
                "level " + std::to_string(n) + " atom " + q.id +
                    " p=" + format_double(p));
      }
    }
  }
  return acc.finish("doob_conditional", std::string(name), tol_rel);
}

CheckResult check_crossing_decay(const Filtration& f, const Weight& w,
                                 const ProfileSet& profiles, double alpha,
                                 int level, double tol_rel) {
  validate_weight(f, w);
  double cs = regularity_constant(f, w);
  int big_l = std::max(1, static_cast<int>(std::ceil(std::log2(cs / alpha))));
  while (cs * std::ldexp(1.0, -big_l) > alpha) ++big_l;
  double beta = am_profile(f, profiles, alpha).value;

  CrossingTimes ct = crossing_times(f, w, level, big_l);
  SlackAcc acc;
  auto atoms = f.level(level);
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const Atom& q = atoms[a];
    double denom = 0.0;
    for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count; ++i) {
      denom += w.values[i] * f.leaves()[i].mass;
    }
    for (std::size_t k = 1; k < ct.tau.size(); ++k) {
      double crossed = 0.0;
      for (std::size_t i = q.first_leaf; i < q.first_leaf + q.leaf_count;
           ++i) {
        if (ct.tau[k][i] < ct.infinity) {
          crossed += w.values[i] * f.leaves()[i].mass;
        }
      }
      acc.add(crossed / denom, std::pow(beta, static_cast<double>(k - 1)),
              "atom " + q.id + " k=" + std::to_string(k));
    }
  }
  return acc.finish("crossing_decay", w.name, tol_rel);
}

CheckResult check_crossing_decay(const Filtration& f, const Weight& w,
                                 double alpha, int level, double tol_rel) {
  return check_crossing_decay(f, w, ProfileSet::build(f, w), alpha, level,
                              tol_rel);
}

namespace {

double entry(const std::map<double, ReportEntry>& m, double key) {
  auto it = m.find(key);
  if (it == m.end()) {
    throw std::logic_error("report is missing grid entry " +
                           format_double(key));
  }
  return it->second.value;
}

}  // namespace

std::vector<CheckResult> lattice_checks(const AnalysisContext& ctx,
                                        const ConstantReport& report,
                                        const GridConfig& grids,
                                        double tol_rel) {
  const Filtration& f = *ctx.filtration;
  const Weight& w = ctx.weight;
  std::vector<CheckResult> out;

  {  // exponential constant below every power constant
    SlackAcc acc;
    for (double p : grids.p) {
      acc.add(report.aexp.value, entry(report.ap, p),
              "p=" + format_double(p));
    }
    out.push_back(acc.finish("lattice_ap_dominates_aexp", w.name, tol_rel));
  }
  {  // power-mean constants below the exponential constant
    SlackAcc acc;
    for (double s : grids.s) {
      acc.add(entry(report.asw, s), report.aexp.value,
              "s=" + format_double(s));
    }
    out.push_back(acc.finish("lattice_asw_below_aexp", w.name, tol_rel));
  }
  {  // tailed-maximal constant from the entropy constant
    SlackAcc acc;
    acc.add(report.astar.value, 2.0 + 2.0 * report.alog.value, "global");
    out.push_back(acc.finish("lattice_astar_from_alog", w.name, tol_rel));
  }
  {  // tailed-maximal constant from power-mean constants
    SlackAcc acc;
    for (double s : grids.s) {
      double factor = std::pow(1.0 / (1.0 - s), 1.0 / s);
      acc.add(report.astar.value, entry(report.asw, s) * factor,
              "s=" + format_double(s));
    }
    out.push_back(acc.finish("lattice_astar_from_asw", w.name, tol_rel));
  }
  {  // reverse Holder from the level-set constant
    static constexpr double kDelta[] = {0.5,  0.25, 0.1,  0.05, 0.01, 1e-3,
                                        1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    SlackAcc acc;
    for (double beta : grids.beta) {
      double c = entry(report.alambda, beta);
      for (double d : kDelta) {
        double kappa = c * d / ((1.0 + d) * std::pow(beta, 1.0 + d));
        if (kappa <= 0.5) {
          acc.add(rh_constant(f, w, 1.0 + d).value, 2.0,
                  "beta=" + format_double(beta) +
                      " delta=" + format_double(d));
          break;
        }
      }
    }
    out.push_back(acc.finish("lattice_rh_from_alambda", w.name, tol_rel));
  }
  {  // reverse Holder from the fractional-set constant
    SlackAcc acc;
    for (double eps : grids.eps) {
      double c = entry(report.acf, eps);
      double invq = 1.0 / (1.0 - eps);
      double q = (1.0 + invq) / 2.0;
      double rhs = 1.0 + std::pow(c, invq) * q / (invq - q);
      acc.add(rh_constant(f, w, q).value, rhs, "eps=" + format_double(eps));
    }
    out.push_back(acc.finish("lattice_rh_from_acf", w.name, tol_rel));
  }
  {  // median constant from the exponential constant
    SlackAcc acc;
    double c = report.aexp.value;
    std::vector<double> s_desc(grids.s.begin(), grids.s.end());
    std::sort(s_desc.begin(), s_desc.end(), std::greater<>());
    for (double s : s_desc) {
      if (std::pow(2.0, s - 1.0) * std::pow(c, s) < 0.75) {
        acc.add(report.amed.value, std::pow(4.0, 1.0 / s) * c,
                "s=" + format_double(s));
        break;
      }
    }
    out.push_back(acc.finish("lattice_amed_from_aexp", w.name, tol_rel));
  }
  {  // concentration bound from the median constant
    SlackAcc acc;
    for (double alpha : grids.alpha) {
      if (alpha < 0.25) {
        acc.add(entry(report.am, alpha),
                1.0 - 1.0 / (4.0 * report.amed.value),
                "alpha=" + format_double(alpha));
      }
    }
    out.push_back(acc.finish("lattice_am_from_amed", w.name, tol_rel));
  }
  {  // concentration bound from the entropy constant
    SlackAcc acc;
    double c = std::max(report.alog.value, 1.0);
    double b = 2.0 * c - 1.0;
    double denom = 1.0 + std::exp(b) / (b + 1.0);
    double alpha = 0.25 / denom;
    if (alpha >= 1e-300) {
      acc.add(am_profile(f, ctx.profiles, alpha).value, 0.75,
              "alpha=" + format_double(alpha));
    }
    out.push_back(acc.finish("lattice_am_from_alog", w.name, tol_rel));
  }
  {  // concentration bound from the small-value profile
    SlackAcc acc;
    for (double gamma : grids.gamma) {
      double delta = entry(report.acon, gamma);
      if (!(delta < 1.0)) continue;
      std::vector<double> betas(grids.beta.begin(), grids.beta.end());
      betas.push_back(1.0 - gamma * (1.0 - delta) / 2.0);
      for (double beta : betas) {
        if (!(beta > 0.0) || !(beta < 1.0)) continue;
        double alpha = 1.0 - (1.0 - beta) / gamma - delta;
        if (alpha > 0.0) {
          acc.add(am_profile(f, ctx.profiles, alpha).value, beta,
                  "gamma=" + format_double(gamma) +
                      " beta=" + format_double(beta));
        }
      }
    }
    out.push_back(acc.finish("lattice_am_from_acon", w.name, tol_rel));
  }
  {  // fractional-set constant from reverse Holder
    SlackAcc acc;
    for (double q : grids.q) {
      double eps = (q - 1.0) / q;
      acc.add(acf_constant(f, ctx.profiles, eps).value,
              std::pow(entry(report.rh, q), 1.0 / q),
              "q=" + format_double(q));
    }
    out.push_back(acc.finish("lattice_acf_from_rh", w.name, tol_rel));
  }
  {  // small-value profile from the exponential constant
    SlackAcc acc;
    double c = report.aexp.value;
    for (double gamma : grids.gamma) {
      acc.add(entry(report.acon, gamma),
              c / std::log1p(1.0 / (gamma * c)),
              "gamma=" + format_double(gamma));
    }
    out.push_back(acc.finish("lattice_acon_from_aexp", w.name, tol_rel));
  }
  return out;
}

CheckResult check_witness_consistency(const Filtration& f, const Weight& w,
                                      const ConstantReport& report) {
  SlackAcc acc;
  auto probe = [&](const char* key, const ReportEntry& e) {
    double again = reevaluate(f, w, key, e.witness);
    double diff = std::abs(again - e.value) / std::max(1.0, std::abs(e.value));
    std::string note(key);
    if (!std::isnan(e.witness.param)) {
      note += "(" + format_double(e.witness.param) + ")";
    }
    note += " at " + e.witness.atom_id;
    acc.add(diff, kWitnessTol, note);
  };
  probe("regularity", report.regularity);
  probe("aexp", report.aexp);
  probe("alog", report.alog);
  probe("amed", report.amed);
  probe("astar", report.astar);
  auto probe_map = [&](const char* key,
                       const std::map<double, ReportEntry>& m) {
    for (const auto& [param, e] : m) {
      (void)param;
      probe(key, e);
    }
  };
  probe_map("ap", report.ap);
  probe_map("rh", report.rh);
  probe_map("asw", report.asw);
  probe_map("acon", report.acon);
  probe_map("am", report.am);
  probe_map("amhat", report.amhat);
  probe_map("acf", report.acf);
  probe_map("alambda", report.alambda);
  // The accumulated "slack" here is kWitnessTol - diff; any drift beyond
  // the tolerance makes it negative and fails with tol 0.
  return acc.finish("witness_consistency", w.name, 0.0);
}

CheckResult check_sanity_bounds(const ConstantReport& report,
                                double tol_rel) {
  SlackAcc acc;
  acc.add(1.0, report.regularity.value, "regularity");
  acc.add(1.0, report.aexp.value, "aexp");
  acc.add(1.0, report.amed.value, "amed");
  acc.add(1.0, report.astar.value, "astar");
  for (const auto& [p, e] : report.ap) acc.add(1.0, e.value, "ap(" + format_double(p) + ")");
  for (const auto& [q, e] : report.rh) acc.add(1.0, e.value, "rh(" + format_double(q) + ")");
  for (const auto& [s, e] : report.asw) acc.add(1.0, e.value, "asw(" + format_double(s) + ")");
  return acc.finish("sanity_bounds", report.weight, tol_rel);
}

namespace {

unsigned suite_threads(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("AINFTY_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) hw = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(
      std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

std::vector<CheckResult> suite_for_weight(const Filtration& f,
                                          const Weight& w,
                                          const SuiteConfig& cfg) {
  AnalysisContext ctx = AnalysisContext::build(f, w);
  ConstantReport report = full_report(ctx, cfg.grids);
  if (cfg.corrupt) report.astar.value *= 0.5;

  std::vector<CheckResult> out =
      lattice_checks(ctx, report, cfg.grids, cfg.tol_rel);
  out.push_back(check_lemma_slimit(f, w, cfg.grids.s));
  out.push_back(check_doob_local(f, w.values, w.name, cfg.tol_rel));
  out.push_back(check_conditional_doob(f, w.values, w.name, cfg.grids.p,
                                       cfg.tol_rel));
  out.push_back(check_crossing_decay(f, w, ctx.profiles, cfg.crossing_alpha,
                                     cfg.crossing_level, cfg.tol_rel));
  out.push_back(check_witness_consistency(f, w, report));
  out.push_back(check_sanity_bounds(report, cfg.tol_rel));
  return out;
}

}  // namespace

std::vector<CheckResult> run_suite(const Filtration& f,
                                   const std::vector<Weight>& weights,
                                   const SuiteConfig& config) {
  std::vector<std::vector<CheckResult>> slots(weights.size());
  unsigned nthreads = suite_threads(weights.size());
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      slots[i] = suite_for_weight(f, weights[i], config);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= weights.size()) return;
          slots[i] = suite_for_weight(f, weights[i], config);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<CheckResult> out;
  for (auto& s : slots) {
    out.insert(out.end(), std::make_move_iterator(s.begin()),
               std::make_move_iterator(s.end()));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CheckResult& a, const CheckResult& b) {
                     if (a.check != b.check) return a.check < b.check;
                     return a.weight < b.weight;
                   });
  return out;
}

}  // namespace ainfty
