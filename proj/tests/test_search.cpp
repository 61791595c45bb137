#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "ainfty/search.hpp"
#include "helpers.hpp"

using namespace ainfty;

TEST_CASE("random weights are normalized and reproducible") {
  Filtration f = Filtration::dyadic(4);
  WeightFamily lognormal{WeightFamily::Kind::lognormal, 0.5};
  Weight a = random_weight(f, lognormal, 7);
  Weight b = random_weight(f, lognormal, 7);
  Weight c = random_weight(f, lognormal, 8);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.normalized);
  CHECK(expectation(f, a.values) == doctest::Approx(1.0).epsilon(1e-12));

  WeightFamily flat_family{WeightFamily::Kind::lognormal, 0.0};
  Weight flat = random_weight(f, flat_family, 3);
  for (double v : flat.values) CHECK(v == doctest::Approx(1.0));

  WeightFamily geom{WeightFamily::Kind::geometric, 4.0};
  Weight g = random_weight(f, geom, 0);
  for (std::size_t i = 1; i < g.values.size(); ++i) {
    CHECK(g.values[i] / g.values[i - 1] == doctest::Approx(4.0));
  }
  CHECK(expectation(f, g.values) == doctest::Approx(1.0).epsilon(1e-12));

  WeightFamily spike{WeightFamily::Kind::spike, 1.0};
  Weight s = random_weight(f, spike, 5);
  for (double v : s.values) CHECK(v == doctest::Approx(1.0));

  WeightFamily tall{WeightFamily::Kind::spike, 100.0};
  Weight t = random_weight(f, tall, 5);
  double lo = t.values[0], hi = t.values[0];
  int at_top = 0;
  for (double v : t.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : t.values) {
    if (v == hi) ++at_top;
  }
  CHECK(hi / lo == doctest::Approx(100.0));
  CHECK(at_top == 1);
}

TEST_CASE("estimator and objective parsing") {
  EstimatorRef ap = EstimatorRef::parse("ap:2");
  CHECK(ap.name == "ap");
  CHECK(ap.param == 2.0);
  CHECK(ap.str() == "ap:2");
  EstimatorRef amed = EstimatorRef::parse("amed");
  CHECK(amed.name == "amed");
  CHECK(std::isnan(amed.param));

  CHECK_THROWS(EstimatorRef::parse("nosuch"));
  CHECK_THROWS(EstimatorRef::parse("ap"));        // parameter required
  CHECK_THROWS(EstimatorRef::parse("amed:2"));    // parameter forbidden
  CHECK_THROWS(EstimatorRef::parse("ap:zzz"));
  CHECK_THROWS(EstimatorRef::parse("ap:2x"));
  CHECK_THROWS(EstimatorRef::parse(""));

  ObjectiveSpec ratio = ObjectiveSpec::parse("ap:2/amed");
  CHECK(ratio.num.name == "ap");
  REQUIRE(ratio.den.has_value());
  CHECK(ratio.den->name == "amed");
  CHECK(ratio.str() == "ap:2/amed");
  ObjectiveSpec plain = ObjectiveSpec::parse("astar");
  CHECK_FALSE(plain.den.has_value());
  CHECK_THROWS(ObjectiveSpec::parse("ap:2/amed/astar"));
  CHECK_THROWS(ObjectiveSpec::parse("/amed"));

  ConstraintSpec cap = ConstraintSpec::parse("amed<=1.5");
  CHECK(cap.what.name == "amed");
  CHECK(cap.cap == 1.5);
  CHECK(cap.str() == "amed<=1.5");
  CHECK_THROWS(ConstraintSpec::parse("amed<1.5"));
  CHECK_THROWS(ConstraintSpec::parse("amed<=abc"));

  Filtration f = helpers::f2();
  Weight w = helpers::w13(f);
  CHECK(evaluate_estimator(f, w, ap) == doctest::Approx(4.0 / 3.0));
  CHECK(evaluate_estimator(f, w, EstimatorRef::parse("sreg")) ==
        doctest::Approx(2.0));
  CHECK(evaluate_objective(f, w, ratio) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("annealing is deterministic and monotone") {
  Filtration f = Filtration::dyadic(4);
  SearchSpec spec;
  spec.objective = ObjectiveSpec::parse("ap:2");
  spec.budget = 400;
  spec.seed = 42;

  SearchResult a = optimize(f, spec);
  SearchResult b = optimize(f, spec);
  CHECK(a.feasible);
  CHECK(a.best_objective == b.best_objective);
  CHECK(a.best_weight == b.best_weight);
  CHECK(a.trace == b.trace);

  REQUIRE(a.trace.size() == 400);
  CHECK(a.trace.front() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < a.trace.size(); ++i) {
    CHECK(a.trace[i] >= a.trace[i - 1]);
    CHECK(a.trace[i] >= 1.0);  // the power constant never dips below one
  }
  CHECK(a.best_objective == a.trace.back());
  CHECK(a.best_objective > 1.0);

  Weight best{"best", a.best_weight, true};
  CHECK(evaluate_objective(f, best, spec.objective) ==
        doctest::Approx(a.best_objective).epsilon(1e-10));
  CHECK(a.report.ap.at(2.0).value ==
        doctest::Approx(a.best_objective).epsilon(1e-10));

  SearchResult c = optimize(f, SearchSpec{4, spec.objective, {}, 400, 43,
                                          0.25, 1});
  CHECK(c.best_objective != a.best_objective);
}

TEST_CASE("degenerate searches") {
  SearchSpec spec;
  spec.objective = ObjectiveSpec::parse("ap:2");
  spec.budget = 1;

  Filtration flat = Filtration::dyadic(2);
  SearchResult one = optimize(flat, spec);
  CHECK(one.trace == std::vector<double>{1.0});
  CHECK(one.best_objective == doctest::Approx(1.0));

  Filtration leaf = Filtration::dyadic(0);
  spec.budget = 50;
  SearchResult trivial = optimize(leaf, spec);
  CHECK(trivial.best_objective == doctest::Approx(1.0));

  spec.budget = 0;
  CHECK_THROWS(optimize(flat, spec));
  spec.budget = 10;
  spec.scale = 0.0;
  CHECK_THROWS(optimize(flat, spec));
}

TEST_CASE("constraints hold at every accepted point") {
  Filtration f = Filtration::dyadic(4);
  SearchSpec spec;
  spec.objective = ObjectiveSpec::parse("ap:2");
  spec.constraint = ConstraintSpec::parse("amed<=1.5");
  spec.budget = 300;
  spec.seed = 7;

  SearchResult r = optimize(f, spec);
  CHECK(r.feasible);
  Weight best{"best", r.best_weight, true};
  double cap_val = evaluate_estimator(f, best, spec.constraint->what);
  CHECK(cap_val <= 1.5 + 1e-10 * 1.5);

  // an impossible cap: the median constant is at least one by construction
  spec.constraint = ConstraintSpec::parse("amed<=0.5");
  SearchResult inf = optimize(f, spec);
  CHECK_FALSE(inf.feasible);
  CHECK(std::isnan(inf.best_objective));
  CHECK(inf.best_weight.empty());
  for (double v : inf.trace) CHECK(std::isnan(v));
}

TEST_CASE("restarts pick the best chain") {
  Filtration f = Filtration::dyadic(3);
  SearchSpec spec;
  spec.objective = ObjectiveSpec::parse("ap:2");
  spec.budget = 200;
  spec.seed = 11;
  SearchResult single = optimize(f, spec);
  spec.restarts = 4;
  SearchResult multi = optimize(f, spec);
  CHECK(multi.feasible);
  CHECK(multi.best_objective >= single.best_objective);
  SearchResult again = optimize(f, spec);
  CHECK(multi.best_objective == again.best_objective);
  CHECK(multi.best_weight == again.best_weight);
}

TEST_CASE("gap scan lifts the previous best") {
  SearchSpec spec;
  spec.objective = ObjectiveSpec::parse("ap:2");
  spec.budget = 150;
  spec.seed = 3;

  auto entries = gap_scan(1, 4, spec);
  REQUIRE(entries.size() == 4);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CHECK(entries[i].depth == static_cast<int>(i) + 1);
    CHECK(entries[i].result.feasible);
    CHECK(entries[i].result.best_weight.size() ==
          (std::size_t{1} << entries[i].depth));
  }
  for (std::size_t i = 1; i < entries.size(); ++i) {
    // warm starts keep the scan monotone up to float lift drift
    CHECK(entries[i].result.best_objective >=
          entries[i - 1].result.best_objective * (1.0 - 1e-12));
  }
  // distinct derived seeds per depth
  CHECK(entries[0].seed != entries[1].seed);

  auto again = gap_scan(1, 4, spec);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CHECK(entries[i].result.best_objective ==
          again[i].result.best_objective);
    CHECK(entries[i].result.best_weight == again[i].result.best_weight);
  }

  // the trivial ratio objective stays pinned at one on every depth
  SearchSpec pinned;
  pinned.objective = ObjectiveSpec::parse("aexp/ap:2");
  pinned.budget = 100;
  auto flat_entries = gap_scan(1, 3, pinned);
  for (const auto& e : flat_entries) {
    CHECK(e.result.best_objective <= 1.0 + 1e-9);
  }

  CHECK_THROWS(gap_scan(3, 1, spec));
  CHECK_THROWS(gap_scan(-1, 2, spec));
}
