#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "contractum/corpus.hpp"

using namespace contractum;

namespace {

double find_fact(const CorpusEntry& e, const std::string& name) {
  for (const ExpectedFact& f : e.facts)
    if (f.name == name) return f.value;
  FAIL("missing fact: " << name);
  return 0.0;
}

std::string fact_provenance(const CorpusEntry& e, const std::string& name) {
  for (const ExpectedFact& f : e.facts)
    if (f.name == name) return f.provenance;
  return "";
}

}  // namespace

TEST_CASE("running example entry loads and reproduces its facts", "[corpus]") {
  const CorpusEntry e = example_17();
  CHECK(e.label == "example17");
  CHECK(e.theorem_compatible);
  REQUIRE(e.mode.has_value());
  CHECK(*e.mode == TheoremMode::t14);

  CHECK(find_fact(e, "F(1) low point") == 1.0 / 3.0);
  CHECK(find_fact(e, "F(1) high point") == 0.75);
  CHECK(find_fact(e, "F(0.9)") == 0.5);
  CHECK(find_fact(e, "d_F(1)") == 0.25);
  CHECK(find_fact(e, "fixed point") == 0.0);
  CHECK(fact_provenance(e, "F(0.9)") == "stated");
  CHECK(fact_provenance(e, "d_F(1)") == "recomputed");

  REQUIRE(e.alpha.has_value());
  REQUIRE(e.beta.has_value());
  REQUIRE(e.gamma.has_value());
  REQUIRE(e.p.has_value());
  CHECK((*e.alpha)(0.2) == 4.0 / 3.0);
  CHECK((*e.alpha)(0.6) == 8.0 / 3.0);
  CHECK((*e.beta)(0.25) == 2.0 / 3.0);
  CHECK((*e.beta)(0.4) == 0.5);
  CHECK((*e.gamma)(2.0 / 3.0) == 5.0 / 3.0);
  CHECK((*e.p)(0.25) == 0.25);
  CHECK((*e.p)(1.0 / 3.0) == Catch::Approx(1.0 / 9.0).margin(1e-12));

  REQUIRE(e.fixed_points.size() == 1);
  CHECK(e.fixed_points.front()[0] == 0.0);
}

TEST_CASE("claim 1: no (2-beta, beta) pair admits a selection at x=1", "[corpus]") {
  const ClaimReport rep = verify_claim_1();
  CHECK(rep.holds);
  REQUIRE(rep.checks.size() == 2);

  CHECK(rep.checks[0].lhs == 1.0);
  CHECK(rep.checks[0].rhs == Catch::Approx(1.0).margin(1e-12));
  CHECK_FALSE(rep.checks[0].strict);
  CHECK(rep.checks[0].holds);

  CHECK(rep.checks[1].lhs == 2.0);
  CHECK(rep.checks[1].rhs == Catch::Approx(8.0 / 3.0).margin(1e-12));
  CHECK(rep.checks[1].strict);
  CHECK(rep.checks[1].margin > mu);
  CHECK_FALSE(rep.conclusion.empty());

  // Deterministic: a second run reproduces every margin bit for bit.
  const ClaimReport again = verify_claim_1();
  REQUIRE(again.checks.size() == rep.checks.size());
  for (std::size_t i = 0; i < rep.checks.size(); ++i)
    CHECK(again.checks[i].margin == rep.checks[i].margin);
}

TEST_CASE("claim 2: no constant a > 1 admits an (a, beta) pair", "[corpus]") {
  const ClaimReport rep = verify_claim_2();
  CHECK(rep.holds);

  bool saw_beta_bound = false, saw_emptiness = false;
  for (const ClaimCheck& c : rep.checks) {
    if (c.inequality.find("beta(1/6)") != std::string::npos) {
      saw_beta_bound = true;
      CHECK(c.lhs == Catch::Approx(2.0 / 3.0).margin(1e-12));
      CHECK(c.rhs == Catch::Approx(2.0 / 3.0).margin(1e-12));
      CHECK(c.holds);
    }
    if (c.inequality.find("a >= 8/3") != std::string::npos) {
      saw_emptiness = true;
      CHECK(c.strict);
      // Gap between the cap 3/2 and the requirement 8/3.
      CHECK(c.margin == Catch::Approx(7.0 / 6.0).margin(1e-9));
    }
    if (c.inequality.find("matches") != std::string::npos) {
      CHECK(c.lhs <= 1e-12);
      CHECK(c.holds);
    }
  }
  CHECK(saw_beta_bound);
  CHECK(saw_emptiness);
}

TEST_CASE("claim 3: the declared controls verify branch by branch", "[corpus]") {
  const ClaimReport rep = verify_claim_3();
  CHECK(rep.holds);
  REQUIRE(rep.checks.size() >= 8);
  for (const ClaimCheck& c : rep.checks) {
    INFO(c.inequality);
    CHECK(c.holds);
    if (c.strict) CHECK(c.margin > mu);
  }

  // The written-out verification has genuine equality cases; at least three
  // checks must sit at zero margin within tolerance.
  std::size_t equalities = 0;
  for (const ClaimCheck& c : rep.checks)
    if (!c.strict && std::abs(c.margin) <= 1e-12) ++equalities;
  CHECK(equalities >= 3);
}

TEST_CASE("standard corpus entries load, validate, and converge", "[corpus]") {
  const std::vector<CorpusEntry> all = standard_corpus();
  REQUIRE(all.size() == 4);
  CHECK(all[0].label == "browder-linear");
  CHECK(all[1].label == "two-branch-hausdorff");
  CHECK(all[2].label == "browder-perturbed");
  CHECK(all[3].label == "stall-map");

  const Metric m = Metric::absolute();

  SECTION("linear contraction iterates to its fixed point") {
    const CorpusEntry& a = all[0];
    CHECK(a.theorem_compatible);
    CHECK(find_fact(a, "rate") == 2.0 / 3.0);
    const IterationTrace tr = iterate(a.map, Point::scalar(1.0), *a.alpha, *a.beta, m);
    CHECK(tr.reason == StopReason::converged);
    CHECK(tr.steps.size() < 120);
    CHECK(std::abs(tr.last[0]) <= 1e-8);
  }

  SECTION("hausdorff entry carries lifted controls and two fixed points") {
    const CorpusEntry& b = all[1];
    CHECK(b.theorem_compatible);
    REQUIRE(b.mode.has_value());
    CHECK(*b.mode == TheoremMode::t15);
    CHECK(find_fact(b, "hausdorff k") == 0.75);
    CHECK(find_fact(b, "lifted alpha") == Catch::Approx(7.0 / 6.0).margin(1e-12));
    CHECK(find_fact(b, "lifted product") == Catch::Approx(0.875).margin(1e-12));
    REQUIRE(b.fixed_points.size() == 2);
    for (const Point& fp : b.fixed_points) CHECK(verify_fixed_point(b.map, fp, m));
  }

  SECTION("perturbed entry records the semicontinuity gap") {
    const CorpusEntry& c = all[2];
    CHECK_FALSE(c.theorem_compatible);
    CHECK(c.map.name().find("#perturbed") != std::string::npos);
    CHECK(find_fact(c, "d_F(1/2) after perturbation") == 0.5);
    CHECK(find_fact(c, "d_F(1/2) before perturbation") ==
          Catch::Approx(1.0 / 6.0).margin(1e-12));
    CHECK(find_fact(c, "semicontinuity gap") > 0.3);
  }

  SECTION("stall map plateaus near 0.3") {
    const CorpusEntry& d = all[3];
    CHECK_FALSE(d.theorem_compatible);
    CHECK(find_fact(d, "d_F(10)") == Catch::Approx(0.3 * (1.0 + 1.0 / 11.0)).margin(1e-12));
  }
}

TEST_CASE("stall map orbit classifies as the intermediate limit case", "[corpus]") {
  const CorpusEntry d = corpus_entry("stall-map");
  const Metric m = Metric::absolute();

  // Truncated before the terminal collapse: both estimators sit near 0.3.
  const IterationTrace stalled = direct_orbit(d.map, Point::scalar(10.0), 20, m);
  REQUIRE(stalled.steps.size() == 20);
  CHECK(stalled.reason == StopReason::max_steps);
  CHECK(stalled.delta_est > 0.3);
  CHECK(stalled.delta_est < 0.45);
  CHECK(stalled.nabla_est > 0.3);
  CHECK(stalled.nabla_est < 0.45);
  CHECK(classify_limit_case(stalled) == LimitCase::case_II);

  // Run to completion and the orbit lands exactly on 0.
  const IterationTrace full = direct_orbit(d.map, Point::scalar(10.0), 200, m);
  CHECK(full.reason == StopReason::converged);
  CHECK(full.last[0] == 0.0);
  CHECK(classify_limit_case(full) == LimitCase::case_III);

  // Admissibility-filtered iteration cannot take even one step.
  const ControlFunction a2 = ControlFunction::constant("alpha2", RangeContract::alpha, 2.0);
  const ControlFunction b9 = ControlFunction::constant("beta0.9", RangeContract::beta, 0.9);
  const IterationTrace failed = iterate(d.map, Point::scalar(10.0), a2, b9, m);
  CHECK(failed.reason == StopReason::selection_failed);
  CHECK(failed.steps.empty());
}

TEST_CASE("corpus lookup by label", "[corpus]") {
  CHECK(corpus_entry("example17").label == "example17");
  CHECK(corpus_entry("two-branch-hausdorff").label == "two-branch-hausdorff");
  CHECK_THROWS_WITH(corpus_entry("nonesuch"),
                    Catch::Matchers::ContainsSubstring("unknown corpus label"));
}

TEST_CASE("property: random starts on the running example all converge", "[corpus]") {
  const CorpusEntry e = example_17();
  const Metric m = Metric::absolute();
  std::mt19937_64 rng(0x17c0ffeeULL);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  for (int trial = 0; trial < 20; ++trial) {
    const double x0 = uni(rng);
    INFO("start " << x0);
    const IterationTrace tr = iterate(e.map, Point::scalar(x0), *e.alpha, *e.beta, m);
    CHECK(tr.reason == StopReason::converged);
    CHECK(tr.steps.size() <= 120);
    CHECK(std::abs(tr.last[0]) <= 1e-8);
    for (const PropertyReport& inv : trace_invariants(tr, 8.0 / 3.0)) CHECK(inv.holds());
  }
}
