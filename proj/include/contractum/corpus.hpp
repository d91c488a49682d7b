#pragma once

// Built-in maps and control functions: the running two-branch example on
// [0,1] with its three structural claims, and a small standard corpus of
// positive and negative examples. Every numeric fact declared here is
// recomputed at construction time; a mismatch aborts with a logic_error.

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contractum/config.hpp"
#include "contractum/control.hpp"
#include "contractum/metric.hpp"
#include "contractum/multimap.hpp"
#include "contractum/solver.hpp"

namespace contractum {

struct ExpectedFact {
  std::string name;
  double value = 0.0;
  std::string provenance;  // "stated" (taken as given) or "recomputed" (re-derived at load)
};

struct CorpusEntry {
  std::string label;
  MultivaluedMap map;
  std::optional<ControlFunction> alpha, beta, gamma, p;
  std::optional<TheoremMode> mode;
  bool theorem_compatible = false;
  std::vector<Point> fixed_points;
  std::vector<ExpectedFact> facts;
  std::string notes;
};

namespace detail {

inline void corpus_require(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("corpus: " + what);
}

// Recomputes a fact against its frozen value before admitting it. Stated
// facts keep the frozen value as the fact; recomputed ones keep the actual.
inline void push_fact(std::vector<ExpectedFact>& facts, const std::string& name, double actual,
                      double frozen, const std::string& provenance) {
  corpus_require(std::abs(actual - frozen) <= tau(),
                 name + " recomputed as " + std::to_string(actual));
  facts.push_back({name, provenance == "stated" ? frozen : actual, provenance});
}

inline void push_recomputed(std::vector<ExpectedFact>& facts, const std::string& name,
                            double actual, double frozen) {
  push_fact(facts, name, actual, frozen, "recomputed");
}

inline std::vector<Point> scalar_samples(const Grid1D& grid) {
  std::vector<Point> pts;
  for (double t : grid.points()) pts.push_back(Point::scalar(t));
  return pts;
}

// Grid scan for the zero set of d_F; exact zeros only (threshold 1e-9).
inline std::vector<double> scan_dF_zeros(const MultivaluedMap& F, const Grid1D& grid,
                                         const Metric& m) {
  std::vector<double> zeros;
  for (double x : grid.points())
    if (d_F(F, Point::scalar(x), m) <= 1e-9) zeros.push_back(x);
  return zeros;
}

}  // namespace detail

inline MultivaluedMap map_17() {
  return MultivaluedMap::from_piecewise(
      "example17", Domain::box1d(0.0, 1.0),
      Piecewise1DDesc{
          {Branch::point(1.0, {ImageExpr::constant(1.0 / 3.0), ImageExpr::constant(0.75)}),
           Branch::interval(0.0, 0.75, true, false, {ImageExpr::affine(2.0 / 3.0, 0.0)}),
           Branch::interval(0.75, 1.0, true, true, {ImageExpr::constant(0.5)})}});
}

inline ControlFunction alpha_17() {
  return ControlFunction::from_pieces(
      "alpha17", RangeContract::alpha,
      {Piece::interval(0.0, 0.5, true, true, Shape::constant(4.0 / 3.0)),
       Piece::interval(0.5, infinity(), false, true, Shape::constant(8.0 / 3.0))});
}

inline ControlFunction beta_17() {
  return ControlFunction::from_pieces(
      "beta17", RangeContract::beta,
      {Piece::interval(0.0, 1.0 / 3.0, true, true, Shape::constant(2.0 / 3.0)),
       Piece::interval(1.0 / 3.0, 0.5, false, true, Shape::constant(0.5)),
       Piece::interval(0.5, infinity(), false, true, Shape::constant(1.0 / 3.0))});
}

inline ControlFunction gamma_17() {
  return ControlFunction::from_pieces(
      "gamma17", RangeContract::gamma,
      {Piece::interval(0.0, 1.0 / 3.0, false, false, Shape::constant(0.0)),
       Piece::point(1.0 / 3.0, 1.0 / 3.0),
       Piece::interval(1.0 / 3.0, 0.5, false, false, Shape::constant(0.0)),
       Piece::point(0.5, 1.0 / 3.0),
       Piece::interval(0.5, 2.0 / 3.0, false, false, Shape::constant(0.0)),
       Piece::point(2.0 / 3.0, 5.0 / 3.0),
       Piece::interval(2.0 / 3.0, 1.0, false, true, Shape::constant(0.0))});
}

// The running example: two-point image at 1, scaled branch below 3/4, the
// constant {1/2} branch in between, controls with breakpoints at 1/3 and
// 1/2, and 0 as the unique fixed point.
inline CorpusEntry example_17() {
  const Metric m = Metric::absolute();
  CorpusEntry e{"example17",      map_17(), alpha_17(), beta_17(), gamma_17(), std::nullopt,
                TheoremMode::t14, true,     {},         {},        ""};
  e.p = p_from_gamma(*e.gamma);

  const FiniteClosedSet at_one = e.map.image(Point::scalar(1.0));
  detail::corpus_require(at_one.size() == 2, "image at 1 must have two points");
  detail::push_fact(e.facts, "F(1) low point", at_one.points()[0][0], 1.0 / 3.0, "stated");
  detail::push_fact(e.facts, "F(1) high point", at_one.points()[1][0], 0.75, "stated");
  const FiniteClosedSet near_one = e.map.image(Point::scalar(0.9));
  detail::corpus_require(near_one.size() == 1, "image at 0.9 must be a single point");
  detail::push_fact(e.facts, "F(0.9)", near_one.points()[0][0], 0.5, "stated");
  detail::push_recomputed(e.facts, "d_F(1)", d_F(e.map, Point::scalar(1.0), m), 0.25);

  // alpha(x) = 1 + gamma(1 - beta(x)) pointwise across all three control plateaus.
  for (double x : {0.0, 0.2, 1.0 / 3.0, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0}) {
    const double lhs = (*e.alpha)(x);
    const double rhs = 1.0 + (*e.gamma)(1.0 - (*e.beta)(x));
    detail::corpus_require(std::abs(lhs - rhs) <= tau(),
                           "alpha(x) = 1 + gamma(1-beta(x)) fails at x=" + std::to_string(x));
  }

  const std::vector<double> zeros =
      detail::scan_dF_zeros(e.map, Grid1D{0.0, 1.0, 1e-4, {}}, m);
  detail::corpus_require(zeros.size() == 1 && zeros.front() == 0.0,
                         "fixed-point scan must find exactly {0}");
  e.fixed_points.push_back(Point::scalar(0.0));
  detail::corpus_require(verify_fixed_point(e.map, e.fixed_points.front(), m),
                         "declared fixed point fails verification");
  detail::push_recomputed(e.facts, "fixed point", zeros.front(), 0.0);

  detail::corpus_require(
      check_ab_mapping(e.map, *e.alpha, *e.beta,
                       detail::scalar_samples(Grid1D{0.0, 1.0, 1e-2, {}}), m)
          .holds(),
      "selection check fails on the coarse grid");
  detail::corpus_require(
      validate_preconditions(TheoremSpec::t14(*e.alpha, *e.beta, *e.gamma)).satisfied,
      "t14 preconditions fail");

  e.notes =
      "Image branches: {1/3, 3/4} at 1, {2x/3} on [0, 3/4), {1/2} on [3/4, 1). "
      "The boundary 3/4 belongs to the constant branch; both formulas agree there.";
  return e;
}

// One inequality lhs <= rhs (or lhs < rhs when strict) with its margin.
struct ClaimCheck {
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict = false;
  double margin = 0.0;  // rhs - lhs
  bool holds = false;
};

struct ClaimReport {
  std::string claim;
  std::vector<ClaimCheck> checks;
  bool holds = false;
  std::string conclusion;
};

namespace detail {

inline ClaimCheck le_check(std::string inequality, double lhs, double rhs) {
  ClaimCheck c{std::move(inequality), lhs, rhs, false, rhs - lhs, false};
  c.holds = c.margin >= -tau();
  return c;
}

inline ClaimCheck lt_check(std::string inequality, double lhs, double rhs) {
  ClaimCheck c{std::move(inequality), lhs, rhs, true, rhs - lhs, false};
  c.holds = c.margin > mu;
  return c;
}

inline void finish(ClaimReport& rep) {
  rep.holds = true;
  for (const ClaimCheck& c : rep.checks) rep.holds = rep.holds && c.holds;
}

}  // namespace detail

// At x=1 no pair of the form (2-beta, beta) admits a selection: the nearer
// image point forces beta(1/4) >= 1 and the farther one forces
// alpha(2/3) >= 8/3 > 2.
inline ClaimReport verify_claim_1() {
  const MultivaluedMap F = map_17();
  const Metric m = Metric::absolute();
  const Point one = Point::scalar(1.0);
  const double dF1 = d_F(F, one, m);

  ClaimReport rep;
  rep.claim = "not a (2-beta, beta)-contraction";

  const Point y_near = Point::scalar(0.75);
  const double required_beta = d_F(F, y_near, m) / m(one, y_near);
  rep.checks.push_back(detail::le_check("branch y=3/4 forces beta(1/4) >= 1", 1.0, required_beta));

  const Point y_far = Point::scalar(1.0 / 3.0);
  const double required_alpha = m(one, y_far) / dF1;
  rep.checks.push_back(
      detail::lt_check("branch y=1/3 forces alpha(2/3) >= 8/3 > 2", 2.0, required_alpha));

  detail::finish(rep);
  rep.conclusion = rep.holds
                       ? "both branches at x=1 contradict alpha = 2 - beta; no admissible pair"
                       : "a branch admits an (2-beta, beta) selection";
  return rep;
}

// No constant a > 1 works either: x=1/2 forces beta(1/6) >= 2/3, so the
// product condition caps a below 3/2, while x=1 needs a >= 8/3.
inline ClaimReport verify_claim_2() {
  const MultivaluedMap F = map_17();
  const Metric m = Metric::absolute();

  ClaimReport rep;
  rep.claim = "not an (a, beta)-contraction for constant a > 1";

  const Point half = Point::scalar(0.5);
  const FiniteClosedSet img = F.image(half);
  detail::corpus_require(img.size() == 1, "image at 1/2 must be a single point");
  const Point y = img.points()[0];
  const double d = m(half, y);
  const double dFy = d_F(F, y, m);
  rep.checks.push_back(detail::le_check("d(1/2, y) matches 1/6", std::abs(d - 1.0 / 6.0), 0.0));
  rep.checks.push_back(detail::le_check("d_F(y) matches 1/9", std::abs(dFy - 1.0 / 9.0), 0.0));
  const double required_beta_16 = dFy / d;
  rep.checks.push_back(
      detail::le_check("x=1/2 forces beta(1/6) >= 2/3", 2.0 / 3.0, required_beta_16));

  const Point one = Point::scalar(1.0);
  const double required_beta_14 = d_F(F, Point::scalar(0.75), m) / m(one, Point::scalar(0.75));
  rep.checks.push_back(
      detail::le_check("branch y=3/4 again forces beta(1/4) >= 1", 1.0, required_beta_14));
  const double a_lower = m(one, Point::scalar(1.0 / 3.0)) / d_F(F, one, m);
  const double a_upper = 1.0 / required_beta_16;
  rep.checks.push_back(detail::lt_check(
      "product cap a < 3/2 is below the x=1 requirement a >= 8/3", a_upper, a_lower));

  detail::finish(rep);
  rep.conclusion = rep.holds ? "feasible region for the constant a is empty"
                             : "a constant a survives all constraints";
  return rep;
}

// Positive claim: the declared controls make F an (alpha,beta)-contraction.
// Runs the grid check and theorem preconditions, then replays each branch
// inequality of the written-out verification, flagging the equality cases.
inline ClaimReport verify_claim_3() {
  const MultivaluedMap F = map_17();
  const Metric m = Metric::absolute();
  const ControlFunction alpha = alpha_17();
  const ControlFunction beta = beta_17();
  const ControlFunction gamma = gamma_17();

  ClaimReport rep;
  rep.claim = "an (alpha,beta)-contraction with the declared controls";

  const Grid1D grid{0.0, 1.0, 1e-3, {1.0 / 3.0, 0.5, 0.75, 5.0 / 6.0, 1.0}};
  const MapCheckReport mapcheck =
      check_ab_contraction(F, alpha, beta, detail::scalar_samples(grid), m);
  rep.checks.push_back(detail::le_check("contraction check witnesses on the [0,1] grid",
                                        static_cast<double>(mapcheck.witnesses.size()), 0.0));

  const PreconditionReport pre = validate_preconditions(TheoremSpec::t14(alpha, beta, gamma));
  std::size_t violated = 0;
  for (const PropertyReport& c : pre.checks)
    if (!c.holds()) ++violated;
  rep.checks.push_back(
      detail::le_check("violated t14 preconditions", static_cast<double>(violated), 0.0));

  // Branch x in [0, 3/4), y = 2x/3: condition (B) is an exact equality and
  // condition (A) holds with slack alpha - 1.
  double worst_eq = 0.0;
  double min_A = infinity();
  for (double x = 0.0; x < 0.75; x += 1e-3) {
    const Point px = Point::scalar(x);
    const Point y = F.image(px).points()[0];
    const double d = m(px, y);
    worst_eq = std::max(worst_eq, std::abs(d_F(F, y, m) - beta(d) * d));
    min_A = std::min(min_A, alpha(d) * d_F(F, px, m) - d);
  }
  rep.checks.push_back(
      detail::le_check("branch y=2x/3: d_F(y) = beta(d) d exactly", worst_eq, 0.0));
  rep.checks.push_back(detail::le_check("branch y=2x/3: d <= alpha(d) d_F(x)", 0.0, min_A));

  // Branch x in [3/4, 1), y = 1/2: tight at x=3/4, strict past 5/6.
  double min_B_mid = infinity();
  for (double x = 0.75; x <= 5.0 / 6.0 + tau(); x += 1e-3) {
    const double d = x - 0.5;
    min_B_mid = std::min(min_B_mid, beta(d) * d);
  }
  const double dF_half = d_F(F, Point::scalar(0.5), m);
  rep.checks.push_back(
      detail::le_check("branch y=1/2 on [3/4, 5/6]: d_F(1/2) <= beta(d) d", dF_half, min_B_mid));
  double min_B_hi = infinity();
  for (double x = 5.0 / 6.0 + 1e-3; x < 1.0; x += 1e-3) {
    const double d = x - 0.5;
    min_B_hi = std::min(min_B_hi, beta(d) * d);
  }
  rep.checks.push_back(detail::lt_check("branch y=1/2 on (5/6, 1): d_F(1/2) < beta(d) d",
                                        dF_half, min_B_hi));

  // The overlap point 3/4 gives the same number through either formula.
  rep.checks.push_back(detail::le_check("branch formulas agree at x=3/4",
                                        std::abs(2.0 * 0.75 / 9.0 - dF_half), 0.0));

  // x=1 with y=1/3: condition (A) is an equality, condition (B) strict.
  const Point one = Point::scalar(1.0);
  const Point third = Point::scalar(1.0 / 3.0);
  const double d1 = m(one, third);
  rep.checks.push_back(detail::le_check("x=1: d(1,1/3) = alpha(2/3) d_F(1) exactly",
                                        std::abs(d1 - alpha(d1) * d_F(F, one, m)), 0.0));
  rep.checks.push_back(
      detail::lt_check("x=1: d_F(1/3) < beta(2/3) d(1,1/3)", d_F(F, third, m), beta(d1) * d1));

  detail::finish(rep);
  rep.conclusion = rep.holds ? "all branch inequalities verified; equality cases within tolerance"
                             : "a branch inequality fails";
  return rep;
}

// Steps along the nearest image point without any admissibility filter;
// used to trace maps that are not (alpha,beta)-mappings.
inline IterationTrace direct_orbit(const MultivaluedMap& F, const Point& x0,
                                   std::size_t max_steps, const Metric& m = Metric::euclidean()) {
  IterationTrace trace{x0, x0, {}, StopReason::max_steps, 0.0, 0.0, std::nullopt};
  Point x = x0;
  for (std::size_t n = 0; n < max_steps; ++n) {
    const double dFx = d_F(F, x, m);
    if (dFx <= 1e-9) {
      trace.reason = StopReason::converged;
      break;
    }
    const FiniteClosedSet img = F.image(x);
    Point y = img.points().front();
    double best = m(x, y);
    for (const Point& c : img.points()) {
      const double d = m(x, c);
      if (d < best - tau() || (std::abs(d - best) <= tau() && lex_less(c, y))) {
        y = c;
        best = d;
      }
    }
    trace.steps.push_back({x, y, best, dFx, d_F(F, y, m), 0.0, 0.0});
    x = y;
  }
  trace.last = x;
  if (trace.steps.empty()) {
    trace.delta_est = d_F(F, x0, m);
    return trace;
  }
  trace.delta_est = trace.steps.back().dF_y;
  const std::size_t q = trace.steps.size() - std::max<std::size_t>(1, trace.steps.size() / 4);
  double nabla = infinity();
  for (std::size_t i = q; i < trace.steps.size(); ++i)
    nabla = std::min(nabla, trace.steps[i].d_xy);
  trace.nabla_est = nabla;
  return trace;
}

// (a) the linear single-valued contraction 2x/3, (b) a two-branch constant-k
// Hausdorff contraction lifted to (alpha,beta) controls, (c) the point
// perturbation of (a) whose d_F jumps at 1/2, (d) the stall map whose d_F
// plateaus near 0.3.
inline std::vector<CorpusEntry> standard_corpus() {
  const Metric m = Metric::absolute();
  std::vector<CorpusEntry> entries;

  {
    CorpusEntry a{"browder-linear",
                  MultivaluedMap::from_piecewise(
                      "browder-linear", Domain::box1d(0.0, 1.0),
                      Piecewise1DDesc{{Branch::interval(0.0, 1.0, true, true,
                                                        {ImageExpr::affine(2.0 / 3.0, 0.0)})}}),
                  ControlFunction::constant("alpha1", RangeContract::alpha, 1.0),
                  ControlFunction::constant("beta2/3", RangeContract::beta, 2.0 / 3.0),
                  ControlFunction::constant("gamma0", RangeContract::gamma, 0.0),
                  std::nullopt,
                  TheoremMode::t14,
                  true,
                  {Point::scalar(0.0)},
                  {},
                  "single-valued linear contraction with factor 2/3"};
    a.p = p_from_gamma(*a.gamma);
    detail::push_recomputed(a.facts, "contraction factor",
                            d_F(a.map, Point::scalar(1.0), m), 1.0 / 3.0);
    a.facts.push_back({"rate", 2.0 / 3.0, "stated"});
    const std::vector<double> zeros =
        detail::scan_dF_zeros(a.map, Grid1D{0.0, 1.0, 1e-4, {}}, m);
    detail::corpus_require(zeros.size() == 1 && zeros.front() == 0.0,
                           "browder-linear fixed-point scan must find exactly {0}");
    detail::corpus_require(
        validate_preconditions(TheoremSpec::t14(*a.alpha, *a.beta, *a.gamma)).satisfied,
        "browder-linear t14 preconditions fail");
    detail::corpus_require(
        check_ab_mapping(a.map, *a.alpha, *a.beta,
                         detail::scalar_samples(Grid1D{0.0, 1.0, 1e-2, {}}), m)
            .holds(),
        "browder-linear selection check fails");
    entries.push_back(std::move(a));
  }

  {
    MultivaluedMap two = MultivaluedMap::from_piecewise(
        "two-branch-hausdorff", Domain::box1d(0.0, 1.0),
        Piecewise1DDesc{{Branch::interval(0.0, 1.0, true, true,
                                          {ImageExpr::affine(0.5, 0.0),
                                           ImageExpr::affine(0.25, 0.25)})}});
    const ControlFunction k = ControlFunction::constant("k3/4", RangeContract::beta, 0.75);
    detail::corpus_require(
        check_hausdorff_contraction(two, k, detail::scalar_samples(Grid1D{0.0, 1.0, 2e-2, {}}), m)
            .holds(),
        "two-branch-hausdorff self-validation fails; entry rejected");
    ABControls lifted = embed_hausdorff(k);
    CorpusEntry b{"two-branch-hausdorff",
                  std::move(two),
                  std::move(lifted.alpha),
                  std::move(lifted.beta),
                  std::nullopt,
                  std::nullopt,
                  TheoremMode::t15,
                  true,
                  {Point::scalar(0.0), Point::scalar(1.0 / 3.0)},
                  {},
                  "constant-k Hausdorff contraction; controls lifted from k"};
    b.facts.push_back({"hausdorff k", 0.75, "stated"});
    detail::push_recomputed(b.facts, "lifted alpha", (*b.alpha)(0.5), 7.0 / 6.0);
    detail::push_recomputed(b.facts, "lifted product", (*b.alpha)(0.5) * (*b.beta)(0.5), 0.875);
    for (const Point& fp : b.fixed_points)
      detail::corpus_require(verify_fixed_point(b.map, fp, m),
                             "two-branch-hausdorff declared fixed point fails");
    detail::corpus_require(
        validate_preconditions(TheoremSpec::t15(*b.alpha, *b.beta)).satisfied,
        "two-branch-hausdorff t15 preconditions fail");
    entries.push_back(std::move(b));
  }

  {
    CorpusEntry c{"browder-perturbed",
                  perturb_at(entries[0].map, Point::scalar(0.5), FiniteClosedSet::of({0.0})),
                  std::nullopt,
                  std::nullopt,
                  std::nullopt,
                  std::nullopt,
                  std::nullopt,
                  false,
                  {Point::scalar(0.0)},
                  {},
                  "image at 1/2 replaced by {0}; d_F jumps up there, so it is "
                  "not lower semicontinuous"};
    const double d_perturbed = d_F(c.map, Point::scalar(0.5), m);
    const double d_base = d_F(entries[0].map, Point::scalar(0.5), m);
    detail::push_recomputed(c.facts, "d_F(1/2) after perturbation", d_perturbed, 0.5);
    detail::push_recomputed(c.facts, "d_F(1/2) before perturbation", d_base, 1.0 / 6.0);
    detail::push_recomputed(c.facts, "semicontinuity gap", d_perturbed - d_base, 1.0 / 3.0);
    detail::corpus_require(verify_fixed_point(c.map, c.fixed_points.front(), m),
                           "browder-perturbed fixed point fails");
    entries.push_back(std::move(c));
  }

  {
    CorpusEntry d{"stall-map",
                  MultivaluedMap::from_eval(
                      "stall-map", Domain::box1d(-100.0, 100.0),
                      [](const Point& x) {
                        const double v = x[0];
                        const double sign = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
                        const double step = 0.3 * (1.0 + 1.0 / (1.0 + std::abs(v)));
                        return FiniteClosedSet::of({v - sign * std::min(std::abs(v), step)});
                      }),
                  std::nullopt,
                  std::nullopt,
                  std::nullopt,
                  std::nullopt,
                  std::nullopt,
                  false,
                  {Point::scalar(0.0)},
                  {},
                  "d_F plateaus near 0.3 along the orbit; violates every "
                  "selection hypothesis, used for limit-case classification"};
    detail::push_recomputed(d.facts, "d_F(10)", d_F(d.map, Point::scalar(10.0), m),
                            0.3 * (1.0 + 1.0 / 11.0));
    detail::corpus_require(verify_fixed_point(d.map, d.fixed_points.front(), m),
                           "stall-map fixed point fails");
    entries.push_back(std::move(d));
  }

  return entries;
}

inline CorpusEntry corpus_entry(const std::string& label) {
  if (label == "example17") return example_17();
  std::vector<CorpusEntry> all = standard_corpus();
  for (CorpusEntry& e : all)
    if (e.label == label) return std::move(e);
  throw std::invalid_argument("unknown corpus label: " + label);
}

}  // namespace contractum
