#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ainfty/characterizations.hpp"
#include "ainfty/filtration.hpp"
#include "ainfty/report_io.hpp"
#include "ainfty/search.hpp"
#include "ainfty/verifier.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return std::move(ss).str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failure on '" + path + "'");
}

struct GridOverrides {
  std::vector<double> p, q, s, gamma, alpha, beta, eps;

  ainfty::GridConfig apply() const {
    ainfty::GridConfig g = ainfty::GridConfig::defaults();
    if (!p.empty()) g.p = p;
    if (!q.empty()) g.q = q;
    if (!s.empty()) g.s = s;
    if (!gamma.empty()) g.gamma = gamma;
    if (!alpha.empty()) g.alpha = alpha;
    if (!beta.empty()) g.beta = beta;
    if (!eps.empty()) g.eps = eps;
    return g;
  }
};

struct CommonOpts {
  std::string input;
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 0;
  int depth = 6;
  int iters = 0;
  GridOverrides grids;
};

void add_io(CLI::App* cmd, CommonOpts& o, bool with_input) {
  if (with_input) {
    cmd->add_option("--input", o.input,
                    "input document (filtration plus weights, JSON)");
  }
  cmd->add_option("--output", o.output, "output path (default: stdout)");
}

void add_depth(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--depth", o.depth,
                  "dyadic depth when no input file is given")
      ->check(CLI::Range(0, 24));
}

void add_format(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_grids(CLI::App* cmd, GridOverrides& g) {
  cmd->add_option("--p-grid", g.p, "power-mean exponents p > 1")
      ->delimiter(',');
  cmd->add_option("--q-grid", g.q, "reverse-moment exponents q > 1")
      ->delimiter(',');
  cmd->add_option("--s-grid", g.s, "small-power exponents in (0,1)")
      ->delimiter(',');
  cmd->add_option("--gamma-grid", g.gamma, "threshold levels in (0,1)")
      ->delimiter(',');
  cmd->add_option("--alpha-grid", g.alpha, "mass fractions in (0,1)")
      ->delimiter(',');
  cmd->add_option("--beta-grid", g.beta, "tail shifts in (0,1)")
      ->delimiter(',');
  cmd->add_option("--eps-grid", g.eps, "profile exponents in (0,1)")
      ->delimiter(',');
}

struct Problem {
  ainfty::Filtration f;
  std::vector<ainfty::Weight> weights;
};

ainfty::Weight flat_weight(const ainfty::Filtration& f) {
  return {"flat", std::vector<double>(f.leaf_count(), 1.0), true};
}

Problem load_problem(const CommonOpts& o) {
  Problem prob;
  if (!o.input.empty()) {
    auto doc = ainfty::parse_filtration(read_file(o.input));
    prob.f = std::move(doc.filtration);
    prob.weights = std::move(doc.weights);
    for (auto& w : prob.weights) w = ainfty::normalized(prob.f, std::move(w));
  } else {
    prob.f = ainfty::Filtration::dyadic(o.depth);
  }
  if (prob.weights.empty()) prob.weights.push_back(flat_weight(prob.f));
  return prob;
}

int cmd_analyze(const CommonOpts& o) {
  Problem prob = load_problem(o);
  ainfty::GridConfig grids = o.grids.apply();
  std::vector<ainfty::ConstantReport> reports;
  reports.reserve(prob.weights.size());
  for (const auto& w : prob.weights) {
    reports.push_back(ainfty::full_report(prob.f, w, grids));
  }
  if (o.format == "csv") {
    write_text(o.output, ainfty::reports_to_csv(reports));
  } else {
    nlohmann::json doc;
    doc["schema"] = ainfty::kReportSchema;
    doc["depth"] = prob.f.depth();
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      arr.push_back(
          ainfty::report_to_json(reports[i], prob.weights[i].values));
    }
    doc["reports"] = std::move(arr);
    write_text(o.output, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_verify(const CommonOpts& o, double tolerance, bool corrupt) {
  Problem prob;
  if (!o.input.empty()) {
    prob = load_problem(o);
  } else {
    // built-in suite: seeded log-normal weights of cycling width
    prob.f = ainfty::Filtration::dyadic(o.depth);
    static constexpr double kSigmas[] = {0.25, 0.5, 1.0};
    ainfty::SplitMix64 seeder(o.seed);
    prob.weights.reserve(o.iters);
    for (int i = 0; i < o.iters; ++i) {
      ainfty::WeightFamily family{ainfty::WeightFamily::Kind::lognormal,
                                  kSigmas[i % 3]};
      prob.weights.push_back(
          ainfty::random_weight(prob.f, family, seeder.next()));
    }
  }
  ainfty::SuiteConfig config;
  config.grids = o.grids.apply();
  config.tol_rel = tolerance;
  config.corrupt = corrupt;
  auto results = ainfty::run_suite(prob.f, prob.weights, config);

  std::string out;
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failed;
    out += ainfty::check_to_json(r).dump();
    out += '\n';
  }
  nlohmann::json summary;
  summary["checks"] = results.size();
  summary["failed"] = failed;
  summary["passed"] = failed == 0;
  out += summary.dump();
  out += '\n';
  write_text(o.output, out);
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

std::pair<int, int> parse_depth_range(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos) {
    throw std::invalid_argument("depth range must look like A..B");
  }
  int lo = 0;
  int hi = 0;
  try {
    std::size_t used = 0;
    lo = std::stoi(text.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument(text);
    hi = std::stoi(text.substr(dots + 2), &used);
    if (used != text.size() - dots - 2) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad depth range '" + text + "'");
  }
  if (lo < 0 || hi < lo || hi > 24) {
    throw std::invalid_argument("depth range out of bounds: " + text);
  }
  return {lo, hi};
}

int cmd_search(const CommonOpts& o, const std::string& objective,
               const std::string& constraint, const std::string& scan,
               double scale, int restarts) {
  ainfty::SearchSpec spec;
  spec.depth = o.depth;
  spec.objective = ainfty::ObjectiveSpec::parse(objective);
  if (!constraint.empty()) {
    spec.constraint = ainfty::ConstraintSpec::parse(constraint);
  }
  spec.budget = o.iters;
  spec.seed = o.seed;
  spec.scale = scale;
  spec.restarts = restarts;

  if (!scan.empty()) {
    auto [lo, hi] = parse_depth_range(scan);
    auto entries = ainfty::gap_scan(lo, hi, spec);
    if (o.format == "csv") {
      write_text(o.output, ainfty::gap_scan_to_csv(entries));
    } else {
      write_text(o.output, ainfty::gap_scan_to_json(spec, entries).dump(2) + "\n");
    }
    return kExitOk;
  }
  auto result = ainfty::optimize(ainfty::Filtration::dyadic(o.depth), spec);
  if (o.format == "csv") {
    write_text(o.output, ainfty::trace_to_csv(result));
  } else {
    write_text(o.output,
               ainfty::search_result_to_json(spec, result).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_profile(const CommonOpts& o) {
  Problem prob = load_problem(o);
  ainfty::GridConfig grids = o.grids.apply();
  std::string out;
  for (std::size_t i = 0; i < prob.weights.size(); ++i) {
    if (i) out += '\n';
    out += ainfty::profile_to_csv(prob.f, prob.weights[i], grids);
  }
  write_text(o.output, out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Characterization constants, verification suite, and extremal-weight "
      "search for finite filtered spaces"};
  app.require_subcommand(1);

  CommonOpts analyze_opts;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Compute every characterization constant per weight");
  add_io(analyze, analyze_opts, true);
  add_format(analyze, analyze_opts);
  add_depth(analyze, analyze_opts);
  add_grids(analyze, analyze_opts.grids);

  CommonOpts verify_opts;
  verify_opts.iters = 200;
  double tolerance = 1e-8;
  bool corrupt = false;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the inequality suite; exit 1 if any check fails");
  add_io(verify, verify_opts, true);
  add_depth(verify, verify_opts);
  verify->add_option("--iters", verify_opts.iters,
                     "number of generated weights when no input is given")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_opts.seed, "weight generation seed");
  verify->add_option("--tolerance", tolerance,
                     "relative slack tolerance for inequality checks");
  verify->add_flag("--corrupt", corrupt,
                   "negative control: falsify one constant per report");
  add_grids(verify, verify_opts.grids);

  CommonOpts search_opts;
  search_opts.iters = 2000;
  std::string objective = "ap:2";
  std::string constraint;
  std::string scan;
  double scale = 0.25;
  int restarts = 1;
  CLI::App* search = app.add_subcommand(
      "search", "Anneal leaf weights toward an extremal objective");
  add_io(search, search_opts, false);
  add_format(search, search_opts);
  add_depth(search, search_opts);
  search->add_option("--objective", objective,
                     "estimator to maximize, 'name[:param][/name[:param]]'");
  search->add_option("--constraint", constraint,
                     "feasibility cap, 'name[:param]<=value'");
  search->add_option("--iters", search_opts.iters, "annealing budget")
      ->check(CLI::PositiveNumber);
  search->add_option("--seed", search_opts.seed, "annealing seed");
  search->add_option("--scale", scale, "log-space proposal step")
      ->check(CLI::PositiveNumber);
  search->add_option("--restarts", restarts, "independent chains to merge")
      ->check(CLI::PositiveNumber);
  search->add_option("--scan-depths", scan,
                     "run per depth in 'A..B', warm-starting each from the "
                     "previous best");

  CommonOpts profile_opts;
  CLI::App* profile = app.add_subcommand(
      "profile", "Emit concentration profiles and curves as plot-ready CSV");
  add_io(profile, profile_opts, true);
  add_depth(profile, profile_opts);
  add_grids(profile, profile_opts.grids);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_opts);
    if (*verify) return cmd_verify(verify_opts, tolerance, corrupt);
    if (*search) {
      return cmd_search(search_opts, objective, constraint, scan, scale,
                        restarts);
    }
    if (*profile) return cmd_profile(profile_opts);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
