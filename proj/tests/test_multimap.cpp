#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "contractum/control.hpp"
#include "contractum/metric.hpp"
#include "contractum/multimap.hpp"

using namespace contractum;
using Catch::Matchers::ContainsSubstring;

namespace {

// Running example: F(1) = {1/3, 3/4}; F(x) = {2x/3} on [0, 3/4); F(x) = {1/2}
// on the rest of [0, 1].
MultivaluedMap make_map17() {
  return MultivaluedMap::from_piecewise(
      "map17", Domain::box1d(0.0, 1.0),
      Piecewise1DDesc{{Branch::point(1.0, {ImageExpr::constant(1.0 / 3.0), ImageExpr::constant(0.75)}),
                       Branch::interval(0.0, 0.75, true, false, {ImageExpr::affine(2.0 / 3.0, 0.0)}),
                       Branch::interval(0.75, 1.0, true, true, {ImageExpr::constant(0.5)})}});
}

ControlFunction make_alpha17() {
  return ControlFunction::from_pieces(
      "alpha17", RangeContract::alpha,
      {Piece::interval(0.0, 0.5, true, true, Shape::constant(4.0 / 3.0)),
       Piece::interval(0.5, infinity(), false, true, Shape::constant(8.0 / 3.0))});
}

ControlFunction make_beta17() {
  return ControlFunction::from_pieces(
      "beta17", RangeContract::beta,
      {Piece::interval(0.0, 1.0 / 3.0, true, true, Shape::constant(2.0 / 3.0)),
       Piece::interval(1.0 / 3.0, 0.5, false, true, Shape::constant(0.5)),
       Piece::interval(0.5, infinity(), false, true, Shape::constant(1.0 / 3.0))});
}

// Each step removes min(|x|, 0.3*(1 + 1/(1+|x|))) from |x|: the decrement
// grows along the step, which starves the second admissibility margin.
MultivaluedMap make_decrement_map() {
  return MultivaluedMap::from_eval("decrement", Domain::box1d(-2.0, 2.0), [](const Point& x) {
    const double v = x[0];
    const double mag = std::abs(v);
    const double delta = std::min(mag, 0.3 * (1.0 + 1.0 / (1.0 + mag)));
    const double sign = v >= 0.0 ? 1.0 : -1.0;
    return FiniteClosedSet({Point::scalar(v - sign * delta)});
  });
}

MultivaluedMap make_two_branch() {
  return MultivaluedMap::from_piecewise(
      "two-branch", Domain::box1d(0.0, 1.0),
      Piecewise1DDesc{{Branch::interval(0.0, 1.0, true, true,
                                        {ImageExpr::affine(0.5, 0.0), ImageExpr::affine(0.25, 0.25)})}});
}

}  // namespace

TEST_CASE("piecewise images with point-branch precedence", "[multimap]") {
  const MultivaluedMap F = make_map17();
  const Metric m = Metric::absolute();

  const FiniteClosedSet at_one = F.image(Point::scalar(1.0));
  REQUIRE(at_one.size() == 2);
  CHECK(at_one.points()[0][0] == 1.0 / 3.0);
  CHECK(at_one.points()[1][0] == 0.75);

  CHECK(F.image(Point::scalar(0.5)).points()[0][0] == Catch::Approx(1.0 / 3.0).margin(1e-15));
  CHECK(F.image(Point::scalar(0.0)).points()[0][0] == 0.0);
  CHECK(F.image(Point::scalar(0.8)).points()[0][0] == 0.5);
  CHECK_THROWS_AS(F.image(Point::scalar(1.5)), std::domain_error);

  CHECK(d_F(F, Point::scalar(1.0), m) == 0.25);
  CHECK(d_F(F, Point::scalar(1.0 / 3.0), m) == Catch::Approx(0.1111111111111111).margin(1e-12));
  CHECK(d_F(F, Point::scalar(0.0), m) == 0.0);
}

TEST_CASE("selection prefers the admissible member over the nearest", "[multimap]") {
  const MultivaluedMap F = make_map17();
  const ControlFunction alpha = make_alpha17();
  const ControlFunction beta = make_beta17();
  const Metric m = Metric::absolute();

  // From x = 1 the nearer member 3/4 violates the image-distance bound
  // (beta(1/4)*1/4 = 1/6 < d_F(3/4) = 1/4); the admissible choice is 1/3.
  const SelectionRecord rec = select_step(F, Point::scalar(1.0), alpha, beta, m);
  CHECK(rec.y[0] == 1.0 / 3.0);
  CHECK(rec.dF_x == 0.25);
  CHECK(rec.d_xy == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(rec.marginA >= -tau());
  CHECK(rec.marginB == Catch::Approx(1.0 / 9.0).margin(1e-12));

  const SelectionRecord rec2 = select_step(F, rec.y, alpha, beta, m);
  CHECK(rec2.y[0] == Catch::Approx(2.0 / 9.0).margin(1e-15));
  CHECK(rec2.marginB >= -tau());
}

TEST_CASE("selection short-circuits at fixed points", "[multimap]") {
  const MultivaluedMap F = make_map17();
  const SelectionRecord rec =
      select_step(F, Point::scalar(0.0), make_alpha17(), make_beta17(), Metric::absolute());
  CHECK(rec.y[0] == 0.0);
  CHECK(rec.d_xy == 0.0);
  CHECK(rec.dF_y == 0.0);
  CHECK(rec.marginA == 0.0);
  CHECK(rec.marginB == 0.0);
}

TEST_CASE("selection failure carries the least-bad candidate", "[multimap]") {
  const MultivaluedMap F = make_decrement_map();
  const ControlFunction alpha = ControlFunction::constant("one", RangeContract::alpha, 1.0);
  const ControlFunction beta = ControlFunction::constant("b", RangeContract::beta, 0.7);
  const Metric m = Metric::absolute();

  // At x = 1 the only candidate is y = 0.55 with d_F(y) ~ 0.4935 while the
  // bound is 0.7 * 0.45 = 0.315.
  try {
    select_step(F, Point::scalar(1.0), alpha, beta, m);
    FAIL("selection unexpectedly succeeded");
  } catch (const selection_error& e) {
    CHECK_THAT(e.what(), ContainsSubstring("not an (alpha,beta)-mapping at x=1"));
    CHECK(e.near_miss().y[0] == Catch::Approx(0.55).margin(1e-12));
    CHECK(e.near_miss().marginA >= -tau());
    CHECK(e.near_miss().marginB == Catch::Approx(-0.1785483870967742).margin(1e-12));
  }
}

TEST_CASE("mapping check over a sample grid", "[multimap]") {
  const MultivaluedMap F = make_map17();
  const ControlFunction alpha = make_alpha17();
  const ControlFunction beta = make_beta17();
  const Metric m = Metric::absolute();
  const std::vector<Point> samples = grid_points_1d(Grid1D{0.0, 1.0, 1e-2, {1.0 / 3.0}});

  const MapCheckReport ok = check_ab_mapping(F, alpha, beta, samples, m);
  CHECK(ok.holds());
  CHECK_THAT(ok.parameters, ContainsSubstring("sample points in domain"));

  // Redirecting 0.5 to {0.9} breaks admissibility at 0.5 itself and at every
  // x in [3/4, 1) whose sole candidate y = 1/2 now has d_F(y) = 0.4.
  const MultivaluedMap broken = perturb_at(F, Point::scalar(0.5), FiniteClosedSet::of({0.9}));
  const MapCheckReport bad = check_ab_mapping(broken, alpha, beta, samples, m);
  CHECK_FALSE(bad.holds());
  CHECK(bad.witnesses.size() == 26);
  CHECK(bad.witnesses.front().x[0] == 0.5);
  CHECK_THAT(bad.witnesses.front().detail, ContainsSubstring("not an (alpha,beta)-mapping"));
}

TEST_CASE("contraction check adds the product condition", "[multimap]") {
  const Metric m = Metric::absolute();
  const std::vector<Point> samples = grid_points_1d(Grid1D{0.0, 1.0, 0.05, {}});

  const MapCheckReport ok =
      check_ab_contraction(make_map17(), make_alpha17(), make_beta17(), samples, m);
  CHECK(ok.holds());
  CHECK_THAT(ok.parameters, ContainsSubstring("product checked"));

  // The identity map satisfies selection trivially (every point is fixed),
  // so only the product condition can fail.
  const MultivaluedMap identity =
      MultivaluedMap::from_piecewise("identity", Domain::box1d(0.0, 1.0),
                                     Piecewise1DDesc{{Branch::interval(
                                         0.0, 1.0, true, true, {ImageExpr::affine(1.0, 0.0)})}});
  const MapCheckReport bad = check_ab_contraction(
      identity, ControlFunction::constant("a", RangeContract::alpha, 1.5),
      ControlFunction::constant("b", RangeContract::beta, 0.7), samples, m);
  CHECK_FALSE(bad.holds());
  REQUIRE_FALSE(bad.witnesses.empty());
  CHECK(bad.witnesses.front().value == Catch::Approx(1.05).margin(1e-12));
  CHECK_THAT(bad.witnesses.front().detail, ContainsSubstring("alpha*beta"));
}

TEST_CASE("hausdorff contraction check over sample pairs", "[multimap]") {
  const MultivaluedMap F = make_two_branch();
  const Metric m = Metric::absolute();
  const std::vector<Point> samples = grid_points_1d(Grid1D{0.0, 1.0, 0.05, {}});

  const ControlFunction k34 = ControlFunction::constant("k34", RangeContract::beta, 0.75);
  CHECK(check_hausdorff_contraction(F, k34, samples, m).holds());

  const ControlFunction k02 = ControlFunction::constant("k02", RangeContract::beta, 0.2);
  const MapCheckReport bad = check_hausdorff_contraction(F, k02, samples, m);
  CHECK_FALSE(bad.holds());
  REQUIRE_FALSE(bad.witnesses.empty());
  CHECK(bad.witnesses.front().y.has_value());
}

TEST_CASE("embedding a hausdorff coefficient into selection controls", "[multimap]") {
  const ControlFunction k34 = ControlFunction::constant("k34", RangeContract::beta, 0.75);
  const ABControls emb = embed_hausdorff(k34, 0.5);
  CHECK(emb.alpha(1.0) == Catch::Approx(7.0 / 6.0).margin(1e-12));
  CHECK(emb.beta(1.0) == 0.75);
  CHECK(emb.alpha(1.0) * emb.beta(1.0) == Catch::Approx(0.875).margin(1e-12));
  REQUIRE(emb.alpha.pieces().has_value());

  const ControlFunction k12 = ControlFunction::constant("k12", RangeContract::beta, 0.5);
  CHECK(embed_hausdorff(k12, 0.5).alpha(0.3) == Catch::Approx(1.5).margin(1e-12));

  // Tiny coefficients hit the cap; the product still stays below 1.
  const ControlFunction k001 = ControlFunction::constant("k001", RangeContract::beta, 0.01);
  const ABControls capped = embed_hausdorff(k001, 0.5);
  CHECK(capped.alpha(1.0) == 10.0);
  CHECK(capped.alpha(1.0) * capped.beta(1.0) < 1.0);

  CHECK_THROWS_WITH(embed_hausdorff(k34, 1.0), ContainsSubstring("slack must lie in (0,1)"));
  CHECK_THROWS_WITH(embed_hausdorff(k34, 0.0), ContainsSubstring("slack must lie in (0,1)"));

  // The derived controls drive selection end to end on the source map.
  const Metric m = Metric::absolute();
  const std::vector<Point> samples = grid_points_1d(Grid1D{0.0, 1.0, 0.05, {}});
  CHECK(check_ab_mapping(make_two_branch(), emb.alpha, emb.beta, samples, m).holds());
}

TEST_CASE("perturbation surgery on every backing", "[multimap]") {
  const MultivaluedMap F = make_map17();
  const MultivaluedMap Fp = perturb_at(F, Point::scalar(0.5), FiniteClosedSet::of({0.9}));
  REQUIRE(Fp.piecewise().has_value());
  CHECK(Fp.image(Point::scalar(0.5)).points()[0][0] == 0.9);
  CHECK(Fp.image(Point::scalar(0.49)).points()[0][0] ==
        Catch::Approx(0.32666666666666666).margin(1e-12));
  CHECK(Fp.image(Point::scalar(0.51)).points()[0][0] == Catch::Approx(0.34).margin(1e-12));
  // Re-perturbing the same abscissa replaces the point branch.
  const MultivaluedMap Fpp = perturb_at(Fp, Point::scalar(0.5), FiniteClosedSet::of({0.2}));
  CHECK(Fpp.image(Point::scalar(0.5)).points()[0][0] == 0.2);

  const MultivaluedMap T = MultivaluedMap::from_table(
      "table", TableDesc{{{Point::scalar(0.0), FiniteClosedSet::of({0.0})},
                          {Point::scalar(1.0), FiniteClosedSet::of({0.5})}}});
  const MultivaluedMap Tp = perturb_at(T, Point::scalar(1.0), FiniteClosedSet::of({0.25}));
  REQUIRE(Tp.table().has_value());
  CHECK(Tp.image(Point::scalar(1.0)).points()[0][0] == 0.25);
  const MultivaluedMap Tq = perturb_at(T, Point::scalar(0.2), FiniteClosedSet::of({0.6}));
  CHECK(Tq.domain().contains(Point::scalar(0.2)));
  CHECK(Tq.image(Point::scalar(0.2)).points()[0][0] == 0.6);

  const MultivaluedMap E = MultivaluedMap::from_eval(
      "halve", Domain::box1d(0.0, 1.0),
      [](const Point& x) { return FiniteClosedSet({Point::scalar(x[0] / 2.0)}); });
  const MultivaluedMap Ep = perturb_at(E, Point::scalar(0.5), FiniteClosedSet::of({0.1}));
  CHECK(Ep.image(Point::scalar(0.5)).points()[0][0] == 0.1);
  CHECK(Ep.image(Point::scalar(0.6)).points()[0][0] == Catch::Approx(0.3).margin(1e-15));
}

TEST_CASE("table lookup snaps within tolerance", "[multimap]") {
  const MultivaluedMap T = MultivaluedMap::from_table(
      "orbit", TableDesc{{{Point::scalar(0.0), FiniteClosedSet::of({0.0})},
                          {Point::scalar(0.51), FiniteClosedSet::of({0.3})},
                          {Point::scalar(1.0), FiniteClosedSet::of({0.51})}}});
  CHECK(T.domain().contains(Point::scalar(0.51)));
  CHECK(T.image(Point::scalar(0.51 + 1e-13)).points()[0][0] == 0.3);
  CHECK_THROWS_AS(T.image(Point::scalar(0.7)), std::domain_error);
  CHECK_THROWS_WITH(MultivaluedMap::from_table("empty", TableDesc{}),
                    ContainsSubstring("no entries"));
}

TEST_CASE("domains: membership, diameter, dimensionality", "[multimap]") {
  const Domain box = Domain::box({0.0, 0.0}, {1.0, 2.0});
  CHECK(box.contains(Point{0.5, 1.5}));
  CHECK_FALSE(box.contains(Point{1.1, 0.0}));
  CHECK(box.diameter(Metric::euclidean()) == Catch::Approx(2.23606797749979).margin(1e-12));

  const Domain list = Domain::list(FiniteClosedSet::of({0.0, 1.0, 0.4}));
  CHECK(list.diameter(Metric::absolute()) == 1.0);

  CHECK_THROWS_WITH(Domain::box({1.0}, {0.0}), ContainsSubstring("lo <= hi"));

  // Two-dimensional evaluation-backed map.
  const MultivaluedMap H = MultivaluedMap::from_eval(
      "halve2d", Domain::box({0.0, 0.0}, {2.0, 2.0}),
      [](const Point& x) { return FiniteClosedSet({Point{x[0] / 2.0, x[1] / 2.0}}); });
  CHECK(d_F(H, Point{1.0, 2.0}, Metric::euclidean()) ==
        Catch::Approx(1.118033988749895).margin(1e-12));

  CHECK_THROWS_WITH(
      MultivaluedMap::from_piecewise("bad", Domain::box({0.0, 0.0}, {1.0, 1.0}), Piecewise1DDesc{}),
      ContainsSubstring("one-dimensional"));
}
