#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ainfty/filtration.hpp"

namespace ainfty {

/// Atoms with at most this many leaves get exact subset enumeration in
/// concentration profiles; larger atoms fall back to the greedy envelope.
inline constexpr std::size_t kExactProfileMaxLeaves = 20;

/// Moment estimators switch to log-space accumulation when the leaf-weight
/// max/min ratio exceeds this.
inline constexpr double kLogSpaceRatio = 1e12;

/// Location where a swept maximum is attained.
struct Witness {
  int level = -1;
  std::size_t atom_index = Atom::npos;
  std::string atom_id;
  double param = std::numeric_limits<double>::quiet_NaN();
};

struct Extremum {
  double value = 0.0;
  Witness where;
};

struct ProfilePoint {
  double t = 0.0;  // mass fraction of the subset
  double h = 0.0;  // weight fraction of the subset
};

/// Pareto frontier of (mass fraction, weight fraction) pairs over leaf
/// subsets of one atom. Points are sorted by t and strictly increasing in
/// both coordinates, starting at (0,0) and reaching h = 1 at the end. In exact mode
/// every point is achieved by a leaf subset; in envelope mode the points
/// are greedy prefixes by decreasing weight value, whose piecewise-linear
/// hull over-reports (never under-reports) what subsets achieve.
struct ConcentrationProfile {
  int level = 0;
  std::size_t atom_index = 0;
  std::string atom_id;
  bool exact = true;
  std::vector<ProfilePoint> points;

  /// Largest weight fraction reachable with mass fraction <= alpha
  /// (step evaluation in exact mode, linear interpolation in envelope mode).
  double value_at(double alpha) const;

  /// sup h / t^eps over the frontier (vertices, plus interior critical
  /// points of the hull segments in envelope mode).
  double max_power_ratio(double eps) const;
};

ConcentrationProfile concentration_profile(const Filtration& f,
                                           const Weight& w, int level,
                                           std::size_t atom_index);

/// Profiles for every atom of every level, built once and reused across
/// parameter grids.
class ProfileSet {
 public:
  static ProfileSet build(const Filtration& f, const Weight& w);
  const ConcentrationProfile& at(int level, std::size_t atom_index) const;
  bool any_envelope() const { return any_envelope_; }

 private:
  std::vector<std::vector<ConcentrationProfile>> per_level_;
  bool any_envelope_ = false;
};

// Per-atom evaluations. Each global constant below is the maximum of the
// matching per-atom quantity over all levels and atoms; these entry points
// re-evaluate a single atom, e.g. to confirm a witness.
double ap_at(const Filtration& f, const Weight& w, double p, int level,
             std::size_t atom_index);
double rh_at(const Filtration& f, const Weight& w, double q, int level,
             std::size_t atom_index);
double aexp_at(const Filtration& f, const Weight& w, int level,
               std::size_t atom_index);
double asw_at(const Filtration& f, const Weight& w, double s, int level,
              std::size_t atom_index);
double acon_at(const Filtration& f, const Weight& w, double gamma, int level,
               std::size_t atom_index);
double alog_at(const Filtration& f, const Weight& w, int level,
               std::size_t atom_index);
double amed_at(const Filtration& f, const Weight& w, int level,
               std::size_t atom_index);
double astar_at(const Filtration& f, const Weight& w, int level,
                std::size_t atom_index);
double alambda_at(const Filtration& f, const Weight& w, double beta, int level,
                  std::size_t atom_index);
double am_at(const Filtration& f, const Weight& w, double alpha, int level,
             std::size_t atom_index);
double amhat_at(const Filtration& f, const Weight& w, double alpha, int level,
                std::size_t atom_index);
double acf_at(const Filtration& f, const Weight& w, double eps, int level,
              std::size_t atom_index);

// Global sweeps.

/// max_Q E(w|Q) E(w^{-1/(p-1)}|Q)^{p-1}, p > 1.
Extremum ap_constant(const Filtration& f, const Weight& w, double p);

/// max_Q E(w^q|Q) / E(w|Q)^q, q > 1.
Extremum rh_constant(const Filtration& f, const Weight& w, double q);

/// max_Q E(w|Q) / exp E(log w|Q).
Extremum aexp_constant(const Filtration& f, const Weight& w);

/// max_Q E(w|Q) / E(w^s|Q)^{1/s}, s in (0,1).
Extremum asw_constant(const Filtration& f, const Weight& w, double s);

/// max_Q P(w <= gamma E(w|Q) | Q), gamma in (0,1).
Extremum acon_profile(const Filtration& f, const Weight& w, double gamma);

/// max_Q E_w(log+ (w / E(w|Q)) | Q).
Extremum alog_constant(const Filtration& f, const Weight& w);

/// max_Q E(w|Q) / median_max(w|Q).
Extremum amed_constant(const Filtration& f, const Weight& w);

/// max_Q E(M*_n w | Q) / E(w|Q) with M*_n the tailed maximal at Q's level.
Extremum astar_constant(const Filtration& f, const Weight& w);

/// max_Q sup_{lambda>1} E_w(X_{w/w_n>lambda}|Q) / (lambda P(w/w_n > beta
/// lambda | Q)), beta in (0,1). The supremum is a max over right-limits at
/// the breakpoints of the two step functions.
Extremum alambda_constant(const Filtration& f, const Weight& w, double beta);

/// max_Q max{ w(A)/w(Q) : A subset of Q's leaves, mu(A) <= alpha mu(Q) }.
Extremum am_profile(const Filtration& f, const Weight& w, double alpha);

/// am_profile computed on the swapped space (measure w dmu, weight 1/w):
/// max_Q max{ mu(A)/mu(Q) : w(A) <= alpha w(Q) }.
Extremum am_hat_profile(const Filtration& f, const Weight& w, double alpha);

/// max_Q sup over achievable (t, h) with t > 0 of h / t^eps, eps in (0,1).
Extremum acf_constant(const Filtration& f, const Weight& w, double eps);

// Profile-reusing variants for sweeping parameter grids.
Extremum am_profile(const Filtration& f, const ProfileSet& profiles,
                    double alpha);
Extremum acf_constant(const Filtration& f, const ProfileSet& profiles,
                      double eps);

/// One supremum candidate behind alambda at a single atom: the right-limits
/// of the two tail step functions at a breakpoint lambda.
struct AlambdaBreakpoint {
  double lambda = 0.0;
  double tail_mean = 0.0;  // E(r X_{r > lambda} | Q), r = w / E(w|Q)
  double tail_prob = 0.0;  // P(r > beta lambda | Q)
  double ratio = 0.0;      // tail_mean / (lambda tail_prob), 0 on empty tail
};

/// Full breakpoint table for one atom, sorted by lambda. alambda_at is the
/// max ratio over these rows.
std::vector<AlambdaBreakpoint> alambda_breakpoints(const Filtration& f,
                                                   const Weight& w,
                                                   double beta, int level,
                                                   std::size_t atom_index);

struct GridConfig {
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> s;
  std::vector<double> gamma;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> eps;
  static GridConfig defaults();
};

struct ReportEntry {
  double value = 0.0;
  Witness witness;
};

/// Every characterization constant of one weight, evaluated on the
/// parameter grids, with the attaining atom recorded per entry.
struct ConstantReport {
  std::string weight;
  bool envelope = false;  // some atom exceeded the exact-enumeration cap
  ReportEntry regularity;
  ReportEntry aexp;
  ReportEntry alog;
  ReportEntry amed;
  ReportEntry astar;
  std::map<double, ReportEntry> ap;
  std::map<double, ReportEntry> rh;
  std::map<double, ReportEntry> asw;
  std::map<double, ReportEntry> acon;
  std::map<double, ReportEntry> am;
  std::map<double, ReportEntry> amhat;
  std::map<double, ReportEntry> acf;
  std::map<double, ReportEntry> alambda;
};

/// Shared precomputation for one (filtration, weight) pair: concentration
/// profiles and the swapped space. Holds a pointer to the filtration, which
/// must outlive the context.
struct AnalysisContext {
  const Filtration* filtration = nullptr;
  Weight weight;
  ProfileSet profiles;
  SwappedSpace swapped;
  ProfileSet swapped_profiles;

  static AnalysisContext build(const Filtration& f, const Weight& w);
};

ConstantReport full_report(const AnalysisContext& ctx,
                           const GridConfig& grids = GridConfig::defaults());
ConstantReport full_report(const Filtration& f, const Weight& w,
                           const GridConfig& grids = GridConfig::defaults());

/// Recomputes the per-atom value behind a reported constant. `key` is one
/// of regularity, ap, rh, aexp, asw, acon, am, amhat, acf, alambda, alog,
/// amed, astar; the parameter (if the family has one) is taken from the
/// witness.
double reevaluate(const Filtration& f, const Weight& w, std::string_view key,
                  const Witness& witness);

}  // namespace ainfty
