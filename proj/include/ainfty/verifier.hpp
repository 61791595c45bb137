#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ainfty/characterizations.hpp"
#include "ainfty/filtration.hpp"

namespace ainfty {

/// Outcome of one named check on one weight (or test function). A check
/// asserts a family of inequalities LHS <= RHS; worst_slack is the smallest
/// relative slack (RHS - LHS) / max(1, |RHS|) over the asserted instances,
/// NaN when every instance was vacuous.
struct CheckResult {
  std::string check;
  std::string weight;
  bool passed = false;
  double worst_slack = std::numeric_limits<double>::quiet_NaN();
  std::string witness;
};

struct SuiteConfig {
  GridConfig grids = GridConfig::defaults();
  double tol_rel = 1e-8;
  bool corrupt = false;  // deliberately falsify one constant per report
  double crossing_alpha = 0.75;
  int crossing_level = 0;
};

/// Power-mean limit behavior: along a descending s grid the swept
/// E(w|Q)/E(w^s|Q)^{1/s} constants are nondecreasing (to 1e-12 relative),
/// stay below the exponential constant, and the gap at the smallest s obeys
/// the bounded-increment bound exp(s R^2 / 8) - 1 with R the log-range of
/// the weight values.
CheckResult check_lemma_slimit(const Filtration& f, const Weight& w,
                               std::span<const double> s_grid);

/// Localized weak (1,1) bound for the tailed maximal function: for every
/// level n, atom B of level n, and lambda > 0,
///   mu(B and {M*_n f > lambda}) <= (2/lambda) int_{B and {|f| > lambda/2}} |f|.
/// Both sides are step functions of lambda, so the check evaluates every
/// breakpoint twice: right-continuous (>) and as a left limit (>=).
CheckResult check_doob_local(const Filtration& f,
                             const std::vector<double>& values,
                             std::string_view name, double tol_rel = 1e-8);

/// (LHS, RHS) of the localized weak bound at one atom and one lambda,
/// right-continuous evaluation.
std::pair<double, double> doob_local_sides(const Filtration& f,
                                           const std::vector<double>& values,
                                           int level, std::size_t atom_index,
                                           double lambda);

/// Conditional Doob bound E(M*_n(f)^p | B) <= (p/(p-1))^p E(|f|^p | B) for
/// every level-n atom B, each p in the grid.
CheckResult check_conditional_doob(const Filtration& f,
                                   const std::vector<double>& values,
                                   std::string_view name,
                                   std::span<const double> p_grid,
                                   double tol_rel = 1e-8);

std::pair<double, double> conditional_doob_sides(
    const Filtration& f, const std::vector<double>& values, int level,
    std::size_t atom_index, double p);

/// Crossing-time decay at the atoms of `level`: with step L chosen from the
/// regularity constant (2^L >= C_S / alpha) and beta the concentration value
/// at alpha, the weighted fraction of each atom where the k-th threshold is
/// crossed is at most beta^{k-1}.
CheckResult check_crossing_decay(const Filtration& f, const Weight& w,
                                 double alpha, int level,
                                 double tol_rel = 1e-8);
CheckResult check_crossing_decay(const Filtration& f, const Weight& w,
                                 const ProfileSet& profiles, double alpha,
                                 int level, double tol_rel = 1e-8);

/// The twelve cross-characterization inequalities with explicit constants,
/// each evaluated from a finished report (plus fresh evaluations where a
/// derived parameter falls off the grid). Instances whose preconditions
/// fail are reported as vacuous rather than asserted.
std::vector<CheckResult> lattice_checks(const AnalysisContext& ctx,
                                        const ConstantReport& report,
                                        const GridConfig& grids,
                                        double tol_rel);

/// Re-evaluates every reported constant at its recorded witness atom and
/// compares to the reported value (1e-10 relative).
CheckResult check_witness_consistency(const Filtration& f, const Weight& w,
                                      const ConstantReport& report);

/// All constants that are >= 1 by construction actually are.
CheckResult check_sanity_bounds(const ConstantReport& report, double tol_rel);

/// Full battery over a set of weights on one filtration: the lattice, the
/// power-mean limit, both maximal-function bounds, crossing decay, witness
/// consistency, and sanity bounds per weight. Parallel over weights
/// (AINFTY_THREADS caps the thread count); results are deterministic and
/// sorted by (check, weight).
std::vector<CheckResult> run_suite(const Filtration& f,
                                   const std::vector<Weight>& weights,
                                   const SuiteConfig& config = {});

}  // namespace ainfty
