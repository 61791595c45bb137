// Acceptance battery: one line per criterion, nonzero exit if any fails.
// Every numeric claim is pinned against the independent oracles in
// oracles.hpp or against closed forms; the command-line binary itself is
// exercised through AINFTY_CLI_PATH.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ainfty/characterizations.hpp"
#include "ainfty/operators.hpp"
#include "ainfty/search.hpp"
#include "ainfty/verifier.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace ainfty;

namespace {

struct Criterion {
  int id = 0;
  bool ok = true;
  double seconds = 0.0;
  std::string note;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      note = what;
    }
  }
};

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

bool holds(double lhs, double rhs, double tol) {
  return (rhs - lhs) / std::max(1.0, std::abs(rhs)) >= -tol;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(AINFTY_CLI_PATH) + " " + args +
                    " > /dev/null 2> /dev/null";
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

// 1. Exact agreement between the concentration sweeps and subset
// enumeration on every dyadic filtration of depth <= 3, 50 weights each.
void criterion1(Criterion& c) {
  const std::vector<double> alphas{0.05, 0.1, 0.25, 0.5, 0.75, 0.9};
  const std::vector<double> epss{0.1, 0.3, 0.5, 0.7, 0.9};
  for (int depth = 0; depth <= 3 && c.ok; ++depth) {
    Filtration f = Filtration::dyadic(depth);
    for (std::uint64_t seed = 0; seed < 50 && c.ok; ++seed) {
      Weight w = helpers::lognormal(f, 1.0, 1000 * depth + seed);
      SwappedSpace sw = swap_measure(f, w);
      for (double alpha : alphas) {
        double lib = am_profile(f, w, alpha).value;
        double ref = oracle::sweep(f, [&](const Atom& q) {
          return oracle::am(f, w, alpha, q);
        });
        c.expect(lib == ref, "am mismatch at alpha=" +
                                 std::to_string(alpha) + " depth " +
                                 std::to_string(depth));
        double hat = am_hat_profile(f, w, alpha).value;
        double hat_ref = oracle::sweep(sw.filtration, [&](const Atom& q) {
          return oracle::am(sw.filtration, sw.weight, alpha, q);
        });
        c.expect(hat == hat_ref, "amhat mismatch at alpha=" +
                                     std::to_string(alpha));
        double direct = oracle::sweep(f, [&](const Atom& q) {
          return oracle::amhat_direct(f, w, alpha, q);
        });
        c.expect(close_rel(hat, direct, 1e-12),
                 "amhat differs from direct enumeration");
      }
      for (double eps : epss) {
        double lib = acf_constant(f, w, eps).value;
        double ref = oracle::sweep(f, [&](const Atom& q) {
          return oracle::acf(f, w, eps, q);
        });
        c.expect(lib == ref, "acf mismatch at eps=" + std::to_string(eps));
      }
    }
  }
}

// 2. Conditional-expectation identities on 500 random (tree, weight) pairs.
void criterion2(Criterion& c) {
  for (std::uint64_t seed = 0; seed < 500 && c.ok; ++seed) {
    Filtration f = helpers::random_tree(seed, 1 + static_cast<int>(seed % 6));
    Weight w = helpers::lognormal(f, 0.75, seed + 7000);
    auto fn = helpers::random_function(f, seed + 9000, true);
    double total = expectation(f, fn);

    for (int n = 0; n <= f.depth() && c.ok; ++n) {
      LevelFunction g = cond_exp(f, fn, n);
      double avg = 0.0;
      auto atoms = f.level(n);
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        avg += g.values[k] * atoms[k].mass;
      }
      c.expect(close_rel(avg, total, 1e-12), "averaging identity failed");

      if (n < f.depth()) {
        LevelFunction fine = cond_exp(f, fn, n + 1);
        LevelFunction towered = cond_exp(f, to_leaf_function(f, fine), n);
        for (std::size_t k = 0; k < g.values.size(); ++k) {
          c.expect(close_rel(towered.values[k], g.values[k], 1e-12),
                   "tower identity failed");
        }
      }

      std::vector<double> ones(f.leaf_count(), 1.0);
      LevelFunction unit = weighted_cond_exp(f, w, ones, n);
      for (double v : unit.values) {
        c.expect(close_rel(v, 1.0, 1e-12),
                 "weighted expectation of 1 is not 1");
      }
    }

    SwappedSpace sw = swap_measure(f, w);
    double mass_total = 0.0;
    for (std::size_t i = 0; i < f.leaf_count(); ++i) {
      double back = sw.weight.values[i] * sw.filtration.leaves()[i].mass;
      c.expect(close_rel(back, f.leaves()[i].mass, 1e-12),
               "swap does not invert the density");
      mass_total += back;
    }
    c.expect(close_rel(mass_total, 1.0, 1e-12), "swapped space unnormalized");
    c.expect(close_rel(expectation(sw.filtration, sw.weight.values), 1.0,
                       1e-12),
             "swapped weight not normalized");
  }
}

// 3. Power-mean limit on 200 weights with values pinned inside [0.1, 10]:
// monotone in s, dominated by the exponential constant, and within 1% of it
// by s = 1e-3.
void criterion3(Criterion& c) {
  const std::vector<double> grid{0.5, 0.2, 0.1, 0.01, 0.001};
  Filtration f = Filtration::dyadic(6);
  for (std::uint64_t seed = 0; seed < 200 && c.ok; ++seed) {
    Rng rng(seed + 40000);
    std::vector<double> values(f.leaf_count());
    for (double& v : values) {
      v = std::clamp(std::exp(0.5 * rng.gaussian()), 0.1, 10.0);
    }
    Weight w{"clamped#" + std::to_string(seed), values, false};
    c.expect(check_lemma_slimit(f, w, grid).passed,
             "power-mean limit check failed");
    double aexp = aexp_constant(f, w).value;
    double asw = asw_constant(f, w, 0.001).value;
    c.expect((aexp - asw) / asw <= 0.01, "limit gap above 1% at s=1e-3");
  }
}

// 4. The inequality lattice at depth 6 on 200 lognormal weights, plus the
// explicit constants behind three of the implications.
void criterion4(Criterion& c) {
  const double sigmas[3] = {0.25, 0.5, 1.0};
  double factor_small = std::pow(1.0 / (1.0 - 0.001), 1.0 / 0.001);
  c.expect(std::abs(factor_small - std::exp(1.0)) / std::exp(1.0) <= 0.05,
           "small-s factor drifts from e");

  Filtration f = Filtration::dyadic(6);
  GridConfig grids = GridConfig::defaults();
  for (std::uint64_t seed = 0; seed < 200 && c.ok; ++seed) {
    Weight w = helpers::lognormal(f, sigmas[seed % 3], seed + 50000);
    AnalysisContext ctx = AnalysisContext::build(f, w);
    ConstantReport report = full_report(ctx, grids);
    for (const auto& r : lattice_checks(ctx, report, grids, 1e-8)) {
      c.expect(r.passed, r.check + " failed: " + r.witness);
    }

    double astar = report.astar.value;
    c.expect(holds(astar, 2.0 + 2.0 * report.alog.value, 1e-8),
             "astar exceeds the entropy bound");
    double best = std::numeric_limits<double>::infinity();
    for (double s : grids.s) {
      double factor = std::pow(1.0 / (1.0 - s), 1.0 / s);
      best = std::min(best, report.asw.at(s).value * factor);
    }
    c.expect(holds(astar, best, 1e-8), "astar exceeds the power-mean bound");

    for (double q : grids.q) {
      double eps = (q - 1.0) / q;
      c.expect(holds(acf_constant(f, ctx.profiles, eps).value,
                     std::pow(report.rh.at(q).value, 1.0 / q), 1e-8),
               "concentration exceeds the reverse Holder bound");
    }

    double aexp = report.aexp.value;
    std::vector<double> s_desc = grids.s;
    std::sort(s_desc.begin(), s_desc.end(), std::greater<>());
    for (double s : s_desc) {
      if (std::pow(2.0, s - 1.0) * std::pow(aexp, s) < 0.75) {
        c.expect(holds(report.amed.value, std::pow(4.0, 1.0 / s) * aexp,
                       1e-8),
                 "median constant exceeds its bound");
        break;
      }
    }
  }
}

// 5. The two-leaf fixture with raw weight (1, 3): oracle against closed
// forms, then the library against the same closed forms, all to 1e-12.
void criterion5(Criterion& c) {
  Filtration f = helpers::f2();
  Weight w = helpers::w13(f);
  const Atom& root = f.atom(0, 0);
  const double sqrt3 = std::sqrt(3.0);

  struct Golden {
    const char* name;
    double oracle_value;
    double library_value;
    double closed_form;
  };
  const Golden goldens[] = {
      {"ap(2)", oracle::ap(f, w, 2.0, root), ap_constant(f, w, 2.0).value,
       4.0 / 3.0},
      {"rh(2)", oracle::rh(f, w, 2.0, root), rh_constant(f, w, 2.0).value,
       5.0 / 4.0},
      {"aexp", oracle::aexp(f, w, root), aexp_constant(f, w).value,
       2.0 / sqrt3},
      {"asw(0.5)", oracle::asw(f, w, 0.5, root),
       asw_constant(f, w, 0.5).value,
       2.0 / ((1.0 + sqrt3) / 2.0 * (1.0 + sqrt3) / 2.0)},
      {"alog", oracle::alog(f, w, root), alog_constant(f, w).value,
       0.75 * std::log(1.5)},
      {"amed",
       oracle::sweep(f, [&](const Atom& q) { return oracle::amed(f, w, q); }),
       amed_constant(f, w).value, 1.0},
      {"astar", oracle::astar_global(f, w), astar_constant(f, w).value,
       1.25},
      {"alambda(0.5)", oracle::alambda(f, w, 0.5, root),
       alambda_constant(f, w, 0.5).value, 1.5},
      {"am(0.5)", oracle::am(f, w, 0.5, root), am_profile(f, w, 0.5).value,
       0.75},
      {"acf(0.5)", oracle::acf(f, w, 0.5, root),
       acf_constant(f, w, 0.5).value, 0.75 * std::sqrt(2.0)},
      {"regularity", 2.0, regularity_constant(f, w), 2.0},
  };
  for (const auto& g : goldens) {
    c.expect(close_rel(g.oracle_value, g.closed_form, 1e-12),
             std::string(g.name) + ": oracle off closed form");
    c.expect(close_rel(g.library_value, g.closed_form, 1e-12),
             std::string(g.name) + ": library off closed form");
  }
}

// 6. Maximal-function bounds on 200 random functions, half of them signed,
// every breakpoint lambda, p in {1.5, 2, 3}.
void criterion6(Criterion& c) {
  const std::vector<double> ps{1.5, 2.0, 3.0};
  for (std::uint64_t seed = 0; seed < 200 && c.ok; ++seed) {
    Filtration f = helpers::random_tree(seed + 300,
                                        1 + static_cast<int>(seed % 6));
    auto fn = helpers::random_function(f, seed + 60000, seed % 2 == 0);
    c.expect(check_doob_local(f, fn, "fn").passed,
             "weak (1,1) bound failed");
    c.expect(check_conditional_doob(f, fn, "fn", ps).passed,
             "conditional moment bound failed");
  }
}

// 7. Crossing-time decay on 50 weights whose regularity constant stays
// below 4, cross-checked against the walk-based oracle.
void criterion7(Criterion& c) {
  Filtration f = Filtration::dyadic(5);
  int collected = 0;
  int checked_against_oracle = 0;
  for (std::uint64_t seed = 0; collected < 50 && seed < 5000 && c.ok;
       ++seed) {
    Weight w = helpers::lognormal(f, 0.8, seed + 70000);
    if (regularity_constant(f, w) > 4.0) continue;
    ++collected;
    c.expect(check_crossing_decay(f, w, 0.75, 0).passed,
             "crossing decay failed");
    if (checked_against_oracle < 5) {
      ++checked_against_oracle;
      CrossingTimes ct = crossing_times(f, w, 0, 2);
      for (std::size_t k = 0; k < ct.tau.size(); ++k) {
        for (std::size_t i = 0; i < f.leaf_count(); ++i) {
          c.expect(ct.tau[k][i] ==
                       oracle::crossing_time(f, w, 0, 2,
                                             static_cast<int>(k), i,
                                             ct.infinity),
                   "crossing time differs from the oracle");
        }
      }
    }
  }
  c.expect(collected == 50, "could not collect 50 admissible weights");
}

// 8. The binary end to end: byte-identical seeded searches with a
// nondecreasing trace, and corrupt verification exiting nonzero.
void criterion8(Criterion& c) {
  const std::string out_a = "/tmp/ainfty_accept_a.json";
  const std::string out_b = "/tmp/ainfty_accept_b.json";
  std::remove(out_a.c_str());
  std::remove(out_b.c_str());

  std::string search_args = "search --seed 42 --depth 6 --iters 2000";
  c.expect(run_cli(search_args + " --output " + out_a) == 0,
           "first search run failed");
  c.expect(run_cli(search_args + " --output " + out_b) == 0,
           "second search run failed");
  std::string a = slurp(out_a);
  std::string b = slurp(out_b);
  c.expect(!a.empty(), "search produced no output");
  c.expect(a == b, "seeded searches are not byte-identical");

  if (c.ok) {
    nlohmann::json doc = nlohmann::json::parse(a);
    c.expect(doc.at("feasible").get<bool>(), "unconstrained search infeasible");
    const auto& trace = doc.at("trace");
    c.expect(trace.size() == 2000, "trace length is not the budget");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& v : trace) {
      c.expect(v.is_number(), "trace holds a non-number");
      if (!v.is_number()) break;
      double x = v.get<double>();
      c.expect(x >= prev, "trace decreased");
      prev = x;
    }
  }

  c.expect(run_cli("verify --depth 3 --iters 2 --corrupt") == 1,
           "corrupt verification did not exit 1");
  c.expect(run_cli("verify --depth 3 --iters 2") == 0,
           "clean verification did not exit 0");
}

}  // namespace

int main() {
  struct Entry {
    void (*fn)(Criterion&);
    double limit_seconds;  // 0 = no limit asserted
  };
  const Entry entries[] = {
      {criterion1, 5.0},  {criterion2, 10.0}, {criterion3, 0.0},
      {criterion4, 60.0}, {criterion5, 0.0},  {criterion6, 30.0},
      {criterion7, 30.0}, {criterion8, 0.0},
  };

  bool all_ok = true;
  for (int i = 0; i < 8; ++i) {
    Criterion c;
    c.id = i + 1;
    auto start = std::chrono::steady_clock::now();
    entries[i].fn(c);
    c.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    if (entries[i].limit_seconds > 0.0 &&
        c.seconds > entries[i].limit_seconds) {
      c.expect(false, "exceeded " +
                          std::to_string(entries[i].limit_seconds) +
                          "s time limit");
    }
    std::printf("criterion %d: %s (%.2fs)%s%s\n", c.id,
                c.ok ? "PASS" : "FAIL", c.seconds, c.ok ? "" : " - ",
                c.ok ? "" : c.note.c_str());
    all_ok = all_ok && c.ok;
  }
  return all_ok ? 0 : 1;
}
