#pragma once

// Multivalued self-maps with finite closed images: piecewise one-dimensional
// descriptors, explicit tables, and opaque evaluators; the selection step
// satisfying the two admissibility margins; and the sampled map-level checks
// (mapping property, contraction product, Hausdorff contraction, embedding).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contractum/config.hpp"
#include "contractum/control.hpp"
#include "contractum/metric.hpp"

namespace contractum {

// y = a*x + b, the image vocabulary of one-dimensional piecewise maps.
struct ImageExpr {
  double a = 0.0;
  double b = 0.0;

  static ImageExpr constant(double v) { return {0.0, v}; }
  static ImageExpr affine(double a, double b) { return {a, b}; }
  double eval(double x) const { return a * x + b; }
};

// One branch of a piecewise one-dimensional map. Point branches (lo == hi)
// take precedence over interval branches regardless of declaration order.
struct Branch {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_lo = true;
  bool closed_hi = true;
  std::vector<ImageExpr> images;

  bool is_point() const { return lo == hi; }

  static Branch point(double at, std::vector<ImageExpr> images) {
    return {at, at, true, true, std::move(images)};
  }
  static Branch interval(double lo, double hi, bool closed_lo, bool closed_hi,
                         std::vector<ImageExpr> images) {
    return {lo, hi, closed_lo, closed_hi, std::move(images)};
  }
};

struct Piecewise1DDesc {
  std::vector<Branch> branches;
};

struct TableDesc {
  std::vector<std::pair<Point, FiniteClosedSet>> entries;
};

class Domain {
 public:
  enum class Kind { box, list };

  static Domain box1d(double lo, double hi) { return box({lo}, {hi}); }
  static Domain box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size())
      throw std::invalid_argument("box domain needs matching bounds");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i])) throw std::invalid_argument("box domain needs lo <= hi");
    Domain d;
    d.kind_ = Kind::box;
    d.lo_ = std::move(lo);
    d.hi_ = std::move(hi);
    return d;
  }
  static Domain list(FiniteClosedSet pts) {
    Domain d;
    d.kind_ = Kind::list;
    d.pts_ = std::move(pts);
    return d;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return kind_ == Kind::box ? lo_.size() : pts_->dim(); }

  bool contains(const Point& x) const {
    if (kind_ == Kind::list) return pts_->contains(x);
    if (x.dim() != lo_.size()) return false;
    for (std::size_t i = 0; i < lo_.size(); ++i)
      if (x[i] < lo_[i] - tau() || x[i] > hi_[i] + tau()) return false;
    return true;
  }

  // Upper bound on pairwise distances: the corner span for boxes, the exact
  // maximum for listed points.
  double diameter(const Metric& m) const {
    if (kind_ == Kind::box) return m(Point(lo_), Point(hi_));
    double best = 0.0;
    const auto& ps = pts_->points();
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) best = std::max(best, m(ps[i], ps[j]));
    return best;
  }

  const std::vector<double>& box_lo() const { return lo_; }
  const std::vector<double>& box_hi() const { return hi_; }
  const FiniteClosedSet& listed() const { return *pts_; }

 private:
  Domain() = default;
  Kind kind_ = Kind::box;
  std::vector<double> lo_, hi_;
  std::optional<FiniteClosedSet> pts_;
};

class MultivaluedMap {
 public:
  static MultivaluedMap from_piecewise(std::string name, Domain domain, Piecewise1DDesc desc) {
    if (domain.dim() != 1)
      throw std::invalid_argument("piecewise descriptors are one-dimensional");
    if (desc.branches.empty()) throw std::invalid_argument("map needs at least one branch");
    MultivaluedMap f(std::move(name), std::move(domain));
    f.piecewise_ = std::move(desc);
    return f;
  }

  static MultivaluedMap from_table(std::string name, TableDesc desc) {
    if (desc.entries.empty()) throw std::invalid_argument("map table has no entries");
    std::vector<Point> keys;
    keys.reserve(desc.entries.size());
    for (const auto& [k, v] : desc.entries) keys.push_back(k);
    MultivaluedMap f(std::move(name), Domain::list(FiniteClosedSet(std::move(keys))));
    f.table_ = std::move(desc);
    return f;
  }

  static MultivaluedMap from_eval(std::string name, Domain domain,
                                  std::function<FiniteClosedSet(const Point&)> fn) {
    MultivaluedMap f(std::move(name), std::move(domain));
    f.fn_ = std::move(fn);
    return f;
  }

  FiniteClosedSet image(const Point& x) const {
    if (!domain_.contains(x))
      throw std::domain_error(name_ + " evaluated outside its domain at x=" + x.str());
    if (piecewise_) return piecewise_image(x[0]);
    if (table_) return table_image(x);
    return fn_(x);
  }

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  const std::optional<Piecewise1DDesc>& piecewise() const { return piecewise_; }
  const std::optional<TableDesc>& table() const { return table_; }

  friend MultivaluedMap perturb_at(const MultivaluedMap& F, const Point& x0,
                                   const FiniteClosedSet& new_image);

 private:
  MultivaluedMap(std::string name, Domain domain) : name_(std::move(name)), domain_(std::move(domain)) {}

  const Branch* find_branch(double x) const {
    for (const Branch& b : piecewise_->branches)
      if (b.is_point() && x == b.lo) return &b;
    for (const Branch& b : piecewise_->branches) {
      if (b.is_point()) continue;
      const bool above = b.closed_lo ? x >= b.lo : x > b.lo;
      const bool below = b.closed_hi ? x <= b.hi : x < b.hi;
      if (above && below) return &b;
    }
    return nullptr;
  }

  FiniteClosedSet piecewise_image(double x) const {
    // Snap onto branch boundaries within tau; fall back to the unsnapped
    // abscissa when the snapped one has no owner (an open edge).
    double snapped = x;
    for (const Branch& b : piecewise_->branches) {
      if (std::abs(x - b.lo) <= tau()) {
        snapped = b.lo;
        break;
      }
      if (std::abs(x - b.hi) <= tau()) {
        snapped = b.hi;
        break;
      }
    }
    const Branch* hit = find_branch(snapped);
    double at = snapped;
    if (hit == nullptr && snapped != x) {
      hit = find_branch(x);
      at = x;
    }
    if (hit == nullptr)
      throw std::domain_error(name_ + " has no branch covering x=" + std::to_string(x));
    std::vector<Point> pts;
    pts.reserve(hit->images.size());
    for (const ImageExpr& e : hit->images) pts.push_back(Point::scalar(e.eval(at)));
    return FiniteClosedSet(std::move(pts));
  }

  FiniteClosedSet table_image(const Point& x) const {
    for (const auto& [k, v] : table_->entries)
      if (coords_within(k, x, tau())) return v;
    throw std::domain_error(name_ + " has no table entry at x=" + x.str());
  }

  std::string name_;
  Domain domain_;
  std::function<FiniteClosedSet(const Point&)> fn_;
  std::optional<Piecewise1DDesc> piecewise_;
  std::optional<TableDesc> table_;
};

inline double d_F(const MultivaluedMap& F, const Point& x, const Metric& m) {
  return dist_point_set(x, F.image(x), m);
}

// Returns a map agreeing with F everywhere except at x0, where the image is
// replaced. Descriptor-backed maps keep a descriptor: piecewise maps gain a
// point branch (which shadows the interval that covered x0), tables get the
// entry replaced or appended.
inline MultivaluedMap perturb_at(const MultivaluedMap& F, const Point& x0,
                                 const FiniteClosedSet& new_image) {
  const std::string name = F.name_ + "#perturbed";
  if (F.piecewise_) {
    Piecewise1DDesc desc = *F.piecewise_;
    std::vector<ImageExpr> exprs;
    for (const Point& p : new_image.points()) exprs.push_back(ImageExpr::constant(p[0]));
    std::erase_if(desc.branches,
                  [&](const Branch& b) { return b.is_point() && std::abs(b.lo - x0[0]) <= tau(); });
    desc.branches.push_back(Branch::point(x0[0], std::move(exprs)));
    return MultivaluedMap::from_piecewise(name, F.domain_, std::move(desc));
  }
  if (F.table_) {
    TableDesc desc = *F.table_;
    bool replaced = false;
    for (auto& [k, v] : desc.entries)
      if (coords_within(k, x0, tau())) {
        v = new_image;
        replaced = true;
      }
    if (!replaced) desc.entries.emplace_back(x0, new_image);
    return MultivaluedMap::from_table(name, std::move(desc));
  }
  auto base = F.fn_;
  return MultivaluedMap::from_eval(name, F.domain_,
                                   [base, x0, new_image](const Point& x) -> FiniteClosedSet {
                                     if (coords_within(x, x0, tau())) return new_image;
                                     return base(x);
                                   });
}

// One evaluated candidate of the selection step. marginA and marginB are the
// slack of the two admissibility inequalities; nonnegative means satisfied.
struct SelectionRecord {
  Point x;
  Point y;
  double d_xy = 0.0;
  double dF_x = 0.0;
  double dF_y = 0.0;
  double marginA = 0.0;
  double marginB = 0.0;
};

class selection_error : public std::runtime_error {
 public:
  selection_error(const std::string& msg, SelectionRecord near_miss)
      : std::runtime_error(msg), near_miss_(std::move(near_miss)) {}
  const SelectionRecord& near_miss() const { return near_miss_; }

 private:
  SelectionRecord near_miss_;
};

// Picks y in F(x) with d(x,y) <= alpha(d(x,y)) * d_F(x) and
// d_F(y) <= beta(d(x,y)) * d(x,y), both within tau. Among admissible
// candidates the nearest wins, ties broken lexicographically. When x is
// already a fixed point (d_F(x) <= tau) the nearest image member is returned
// directly. With no admissible candidate, throws carrying the least-bad
// candidate (largest min-margin).
inline SelectionRecord select_step(const MultivaluedMap& F, const Point& x,
                                   const ControlFunction& alpha, const ControlFunction& beta,
                                   const Metric& m) {
  const FiniteClosedSet img = F.image(x);
  const double dFx = dist_point_set(x, img, m);

  const auto make_record = [&](const Point& y) {
    const double d = m(x, y);
    const double dFy = dist_point_set(y, F.image(y), m);
    return SelectionRecord{x, y, d, dFx, dFy, alpha(d) * dFx - d, beta(d) * d - dFy};
  };

  if (dFx <= tau()) {
    const Point* best = &img.points().front();
    for (const Point& p : img.points()) {
      const double d = m(x, p);
      const double bd = m(x, *best);
      if (d < bd || (d == bd && lex_less(p, *best))) best = &p;
    }
    return make_record(*best);
  }

  std::optional<SelectionRecord> best;
  std::optional<SelectionRecord> near_miss;
  for (const Point& y : img.points()) {
    SelectionRecord rec = make_record(y);
    if (rec.marginA >= -tau() && rec.marginB >= -tau()) {
      if (!best || rec.d_xy < best->d_xy - tau() ||
          (std::abs(rec.d_xy - best->d_xy) <= tau() && lex_less(rec.y, best->y)))
        best = std::move(rec);
    } else if (!near_miss || std::min(rec.marginA, rec.marginB) >
                                 std::min(near_miss->marginA, near_miss->marginB)) {
      near_miss = std::move(rec);
    }
  }
  if (best) return *best;
  throw selection_error("not an (alpha,beta)-mapping at x=" + x.str(), *near_miss);
}

enum class MapCheckKind { ab_mapping, ab_contraction, hausdorff_contraction };

inline std::string to_string(MapCheckKind k) {
  switch (k) {
    case MapCheckKind::ab_mapping: return "ab-mapping";
    case MapCheckKind::ab_contraction: return "ab-contraction";
    case MapCheckKind::hausdorff_contraction: return "hausdorff-contraction";
  }
  return "?";
}

struct MapWitness {
  Point x;
  std::optional<Point> y;
  double value = 0.0;
  std::string detail;
};

struct MapCheckReport {
  MapCheckKind kind = MapCheckKind::ab_mapping;
  Verdict verdict = Verdict::holds_on_sample;
  std::vector<MapWitness> witnesses;
  std::string parameters;

  bool holds() const { return verdict == Verdict::holds_on_sample; }
};

// Selection succeeds at every in-domain sample point. Witnesses carry the
// least-bad candidate at each failing point.
inline MapCheckReport check_ab_mapping(const MultivaluedMap& F, const ControlFunction& alpha,
                                       const ControlFunction& beta,
                                       const std::vector<Point>& samples, const Metric& m) {
  MapCheckReport rep;
  rep.kind = MapCheckKind::ab_mapping;
  std::size_t checked = 0;
  for (const Point& x : samples) {
    if (!F.domain().contains(x)) continue;
    ++checked;
    try {
      select_step(F, x, alpha, beta, m);
    } catch (const selection_error& e) {
      rep.witnesses.push_back({x, e.near_miss().y,
                               std::min(e.near_miss().marginA, e.near_miss().marginB), e.what()});
    }
  }
  std::ostringstream par;
  par << checked << " of " << samples.size() << " sample points in domain";
  rep.parameters = par.str();
  rep.verdict = rep.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

// Mapping property plus the pointwise product condition alpha*beta < 1 on a
// grid over (0, diam].
inline MapCheckReport check_ab_contraction(const MultivaluedMap& F, const ControlFunction& alpha,
                                           const ControlFunction& beta,
                                           const std::vector<Point>& samples, const Metric& m) {
  MapCheckReport rep = check_ab_mapping(F, alpha, beta, samples, m);
  rep.kind = MapCheckKind::ab_contraction;
  const double diam = std::max(F.domain().diameter(m), 1e-3);
  const Grid1D grid{0.0, diam, 1e-3, {}};
  for (double t : grid.points()) {
    if (t <= tau()) continue;
    const double v = alpha(t) * beta(t);
    if (v >= 1.0 - mu)
      rep.witnesses.push_back({Point::scalar(t), std::nullopt, v, "alpha*beta reaches 1 at t"});
  }
  rep.parameters += "; product checked on " + grid.str();
  rep.verdict = rep.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

// H(F(x), F(y)) <= k(d(x,y)) * d(x,y) over all in-domain sample pairs.
inline MapCheckReport check_hausdorff_contraction(const MultivaluedMap& F,
                                                  const ControlFunction& k,
                                                  const std::vector<Point>& samples,
                                                  const Metric& m) {
  MapCheckReport rep;
  rep.kind = MapCheckKind::hausdorff_contraction;
  std::vector<const Point*> xs;
  std::vector<FiniteClosedSet> images;
  for (const Point& x : samples)
    if (F.domain().contains(x)) {
      xs.push_back(&x);
      images.push_back(F.image(x));
    }
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double d = m(*xs[i], *xs[j]);
      if (d <= tau()) continue;
      const double h = hausdorff(images[i], images[j], m);
      const double bound = k(d) * d;
      if (h > bound + tau())
        rep.witnesses.push_back({*xs[i], *xs[j], h - bound, "H exceeds k*d"});
    }
  std::ostringstream par;
  par << xs.size() << " in-domain points, " << xs.size() * (xs.size() - 1) / 2 << " pairs";
  rep.parameters = par.str();
  rep.verdict = rep.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

struct ABControls {
  ControlFunction alpha;
  ControlFunction beta;
};

// Derives (alpha, beta) controls from a Hausdorff contraction coefficient:
// beta is k itself and alpha(t) = min(1 + slack*(1-k(t))/max(k(t), mu_den),
// cap). Uncapped, alpha*k = k + slack*(1-k) < 1; capped means
// k < slack/(cap-1+slack), so cap*k < cap*slack/(cap-1+slack) < 1 for
// slack < 1. Either way the product stays below 1.
inline ABControls embed_hausdorff(const ControlFunction& k, double slack = 0.5) {
  if (!(slack > 0.0 && slack < 1.0))
    throw std::invalid_argument("slack must lie in (0,1)");
  static constexpr double cap = 10.0;
  const auto lift = [slack](double kv) {
    return std::min(1.0 + slack * (1.0 - kv) / std::max(kv, mu_den), cap);
  };
  const std::string alpha_label = "alpha[" + k.label() + "]";
  const std::string beta_label = "beta[" + k.label() + "]";

  bool piecewise_constant = k.pieces().has_value();
  if (piecewise_constant)
    for (const Piece& p : *k.pieces())
      if (p.shape.kind != Shape::Kind::constant) piecewise_constant = false;
  if (piecewise_constant) {
    std::vector<Piece> alpha_pieces;
    for (const Piece& p : *k.pieces()) {
      Piece q = p;
      q.shape = Shape::constant(lift(p.shape.b));
      alpha_pieces.push_back(q);
    }
    return {ControlFunction::from_pieces(alpha_label, RangeContract::alpha, std::move(alpha_pieces)),
            ControlFunction::from_pieces(beta_label, RangeContract::beta, *k.pieces())};
  }
  ControlFunction kc = k;
  return {ControlFunction::from_eval(alpha_label, RangeContract::alpha,
                                     [kc, lift](double t) { return lift(kc(t)); }),
          ControlFunction::from_eval(beta_label, RangeContract::beta,
                                     [kc](double t) { return kc(t); })};
}

}  // namespace contractum
