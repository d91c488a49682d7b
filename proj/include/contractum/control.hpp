#pragma once

// Scalar control functions with range contracts and optional exact piecewise
// descriptors, plus the property checks used by the contraction theorems:
// window-limsup conditions (Reich and Mizoguchi-Takahashi style), essential
// and stable positivity, the gamma -> p transform, certificate chains and
// the Q_eps supremum.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contractum/config.hpp"
#include "contractum/metric.hpp"

namespace contractum {

// Codomain contracts. The domain is [0,inf) except for gamma-like functions,
// which live on (0,1].
enum class RangeContract { alpha, beta, gamma, generic };

inline std::string to_string(RangeContract rc) {
  switch (rc) {
    case RangeContract::alpha: return "alpha";
    case RangeContract::beta: return "beta";
    case RangeContract::gamma: return "gamma";
    case RangeContract::generic: return "generic";
  }
  return "generic";
}

struct Shape {
  enum class Kind { constant, affine };
  Kind kind = Kind::constant;
  double a = 0.0;  // slope (affine only)
  double b = 0.0;  // value (constant) or intercept (affine)

  static Shape constant(double value) { return Shape{Kind::constant, 0.0, value}; }
  static Shape affine(double slope, double intercept) {
    return Shape{Kind::affine, slope, intercept};
  }

  double eval(double t) const { return kind == Kind::constant ? b : a * t + b; }

  // Sup/inf over the closure of [lo, hi]; open endpoints contribute their
  // one-sided limits, which for continuous shapes equal the endpoint values.
  double sup_on(double lo, double hi) const {
    if (kind == Kind::constant) return b;
    return std::max(eval(lo), eval(hi));
  }
  double inf_on(double lo, double hi) const {
    if (kind == Kind::constant) return b;
    return std::min(eval(lo), eval(hi));
  }
};

// One piece of a piecewise descriptor. A point piece has lo == hi and is
// closed on both sides; interval pieces own each boundary exclusively,
// encoded by the closed flags.
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_lo = true;
  bool closed_hi = true;
  Shape shape;

  bool is_point() const { return lo == hi; }

  static Piece point(double at, double value) { return Piece{at, at, true, true, Shape::constant(value)}; }
  static Piece interval(double lo, double hi, bool closed_lo, bool closed_hi, Shape s) {
    return Piece{lo, hi, closed_lo, closed_hi, s};
  }
};

namespace detail {

inline void validate_pieces(const std::vector<Piece>& pieces) {
  if (pieces.empty()) throw std::invalid_argument("piecewise descriptor needs at least one piece");
  for (const Piece& p : pieces) {
    if (std::isnan(p.lo) || std::isnan(p.hi) || p.hi < p.lo)
      throw std::invalid_argument("piece with invalid interval");
    if (p.is_point() && !(p.closed_lo && p.closed_hi))
      throw std::invalid_argument("point piece must be closed");
  }
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const Piece& cur = pieces[i];
    const Piece& next = pieces[i + 1];
    if (std::abs(cur.hi - next.lo) > tau())
      throw std::invalid_argument("pieces must tile the domain without gaps");
    if (cur.closed_hi == next.closed_lo)
      throw std::invalid_argument("piece boundary must be owned by exactly one side");
  }
}

}  // namespace detail

class ControlFunction {
 public:
  static ControlFunction from_eval(std::string label, RangeContract rc,
                                   std::function<double(double)> fn) {
    ControlFunction f(std::move(label), rc, std::move(fn), std::nullopt);
    f.check_range_contract();
    return f;
  }

  static ControlFunction from_pieces(std::string label, RangeContract rc,
                                     std::vector<Piece> pieces) {
    detail::validate_pieces(pieces);
    ControlFunction f(std::move(label), rc, nullptr, std::move(pieces));
    f.check_range_contract();
    return f;
  }

  static ControlFunction constant(std::string label, RangeContract rc, double value) {
    const double hi = rc == RangeContract::gamma ? 1.0 : infinity();
    return from_pieces(std::move(label), rc,
                       {Piece::interval(0.0, hi, rc != RangeContract::gamma, true,
                                        Shape::constant(value))});
  }

  double operator()(double t) const {
    if (!in_domain(t))
      throw std::domain_error(label_ + " evaluated outside its domain at t=" + std::to_string(t));
    if (pieces_) return eval_pieces(t);
    return fn_(t);
  }

  bool in_domain(double t) const {
    if (domain_lo_open_ ? !(t > domain_lo_) : t < domain_lo_ - tau()) return false;
    return t <= domain_hi_ + tau();
  }

  const std::string& label() const { return label_; }
  RangeContract contract() const { return contract_; }
  const std::optional<std::vector<Piece>>& pieces() const { return pieces_; }
  double domain_lo() const { return domain_lo_; }
  double domain_hi() const { return domain_hi_; }
  bool domain_lo_open() const { return domain_lo_open_; }

  // Validity edge for decay majorants of the form 1 - C t^p: the recursion
  // below must start strictly inside [0, validity_hi).
  std::optional<double> validity_hi;

  // Exact supremum of the function over the window (t, t+w], computed from
  // the declared pieces when available (open endpoints contribute limits),
  // otherwise estimated by sampling with geometric refinement toward t+ so
  // that one-sided suprema are not missed. Returns -infinity when the window
  // misses the domain.
  double window_sup(double t, double w) const {
    const double right = t + w;
    if (pieces_) {
      double sup = -infinity();
      for (const Piece& p : *pieces_) {
        if (p.is_point()) {
          if (p.lo > t && p.lo <= right + tau()) sup = std::max(sup, p.shape.b);
          continue;
        }
        const double clip_lo = std::max(p.lo, t);
        const double clip_hi = std::min(p.hi, right);
        if (clip_hi < clip_lo) continue;
        if (clip_hi == clip_lo && !(clip_lo > t)) continue;  // single touch at excluded t
        sup = std::max(sup, p.shape.sup_on(clip_lo, clip_hi));
      }
      return sup;
    }
    double sup = -infinity();
    const auto consider = [&](double s) {
      if (s > t && s <= right && in_domain(s)) sup = std::max(sup, fn_(s));
    };
    for (int k = 1; k <= 64; ++k) consider(t + w * static_cast<double>(k) / 64.0);
    for (int j = 1; j <= 54; ++j) consider(t + w * std::ldexp(1.0, -j));
    return sup;
  }

  // Exact infimum over [a, b] from pieces; closures of open endpoints
  // contribute limit values, matching the infimum over the closed hull.
  std::optional<double> piece_inf(double a, double b) const {
    if (!pieces_) return std::nullopt;
    double inf = infinity();
    for (const Piece& p : *pieces_) {
      if (p.is_point()) {
        if (p.lo >= a - tau() && p.lo <= b + tau()) inf = std::min(inf, p.shape.b);
        continue;
      }
      const double clip_lo = std::max(p.lo, a);
      const double clip_hi = std::min(p.hi, b);
      if (clip_hi < clip_lo) continue;
      inf = std::min(inf, p.shape.inf_on(clip_lo, clip_hi));
    }
    return inf;
  }

  // Sampled supremum over the grid, sharpened to the exact piecewise
  // supremum over [grid.lo, grid.hi] when pieces are declared.
  double sup_on_grid(const Grid1D& grid) const {
    double sup = -infinity();
    for (double t : grid.points())
      if (in_domain(t)) sup = std::max(sup, (*this)(t));
    if (pieces_) {
      for (const Piece& p : *pieces_) {
        if (p.is_point()) {
          if (p.lo >= grid.lo - tau() && p.lo <= grid.hi + tau()) sup = std::max(sup, p.shape.b);
          continue;
        }
        const double clip_lo = std::max(p.lo, grid.lo);
        const double clip_hi = std::min(p.hi, grid.hi);
        if (clip_hi < clip_lo) continue;
        sup = std::max(sup, p.shape.sup_on(clip_lo, clip_hi));
      }
    }
    return sup;
  }

 private:
  ControlFunction(std::string label, RangeContract rc, std::function<double(double)> fn,
                  std::optional<std::vector<Piece>> pieces)
      : label_(std::move(label)), contract_(rc), fn_(std::move(fn)), pieces_(std::move(pieces)) {
    domain_lo_ = rc == RangeContract::gamma ? 0.0 : 0.0;
    domain_lo_open_ = rc == RangeContract::gamma;
    domain_hi_ = rc == RangeContract::gamma ? 1.0 : infinity();
    if (pieces_) {
      domain_lo_ = pieces_->front().lo;
      domain_lo_open_ = !pieces_->front().closed_lo;
      domain_hi_ = pieces_->back().hi;
    }
  }

  const Piece* find_piece(double t) const {
    for (const Piece& p : *pieces_)
      if (p.is_point() && t == p.lo) return &p;
    for (const Piece& p : *pieces_) {
      if (p.is_point()) continue;
      const bool above = p.closed_lo ? t >= p.lo : t > p.lo;
      const bool below = p.closed_hi ? t <= p.hi : t < p.hi;
      if (above && below) return &p;
    }
    return nullptr;
  }

  double eval_pieces(double t) const {
    // Snap to the nearest piece boundary within tau so that boundary
    // ownership is decided exactly; if the snapped abscissa lands on a
    // boundary no piece owns (an open domain edge), the original one is
    // still legitimate, so fall back to it.
    double snapped = t;
    for (const Piece& p : *pieces_) {
      if (std::abs(t - p.lo) <= tau()) {
        snapped = p.lo;
        break;
      }
      if (std::abs(t - p.hi) <= tau()) {
        snapped = p.hi;
        break;
      }
    }
    if (const Piece* p = find_piece(snapped)) return p->shape.eval(snapped);
    if (snapped != t)
      if (const Piece* p = find_piece(t)) return p->shape.eval(t);
    throw std::domain_error(label_ + " has no piece covering t=" + std::to_string(t));
  }

  // Range contracts are enforced at construction by sampling; violations are
  // hard errors. The sample is the default grid clipped to the domain plus
  // all piece breakpoints.
  void check_range_contract() const {
    if (contract_ == RangeContract::generic) return;
    for (double t : contract_sample()) {
      const double v =
          pieces_ ? eval_pieces(t) : fn_(t);
      if (!std::isfinite(v))
        throw std::invalid_argument(label_ + ": non-finite value at t=" + std::to_string(t));
      switch (contract_) {
        case RangeContract::alpha:
          if (v < 1.0 - tau())
            throw std::invalid_argument(label_ + ": alpha contract violated (value < 1) at t=" +
                                        std::to_string(t));
          break;
        case RangeContract::beta:
          if (v < -tau() || v >= 1.0)
            throw std::invalid_argument(label_ + ": beta contract violated (value outside [0,1)) at t=" +
                                        std::to_string(t));
          break;
        case RangeContract::gamma:
          if (v < -tau())
            throw std::invalid_argument(label_ + ": gamma contract violated (negative value) at t=" +
                                        std::to_string(t));
          break;
        default:
          break;
      }
    }
  }

  std::vector<double> contract_sample() const {
    const double lo = domain_lo_open_ ? domain_lo_ + 1e-9 : domain_lo_;
    const double hi = std::min(domain_hi_, 2.0);
    std::vector<double> pts;
    if (hi >= lo) {
      Grid1D g{lo, hi, 1e-3, {}};
      pts = g.points();
    }
    if (pieces_) {
      for (const Piece& p : *pieces_) {
        if (!(domain_lo_open_ && p.lo <= domain_lo_)) pts.push_back(p.lo);
        if (std::isfinite(p.hi)) pts.push_back(p.hi);
      }
    }
    return pts;
  }

  std::string label_;
  RangeContract contract_;
  std::function<double(double)> fn_;
  std::optional<std::vector<Piece>> pieces_;
  double domain_lo_ = 0.0;
  double domain_hi_ = infinity();
  bool domain_lo_open_ = false;
};

enum class ControlProperty {
  reich,
  mizoguchi_takahashi,
  essentially_positive,
  stably_positive,
  nonincreasing,
  bounded,
};

inline std::string to_string(ControlProperty p) {
  switch (p) {
    case ControlProperty::reich: return "reich";
    case ControlProperty::mizoguchi_takahashi: return "mizoguchi_takahashi";
    case ControlProperty::essentially_positive: return "essentially_positive";
    case ControlProperty::stably_positive: return "stably_positive";
    case ControlProperty::nonincreasing: return "nonincreasing";
    case ControlProperty::bounded: return "bounded";
  }
  return "?";
}

enum class Verdict { holds_on_sample, violated };

inline std::string to_string(Verdict v) {
  return v == Verdict::holds_on_sample ? "holds_on_sample" : "violated";
}

struct Witness {
  double input = 0.0;
  double value = 0.0;
};

struct PropertyReport {
  ControlProperty property = ControlProperty::bounded;
  Verdict verdict = Verdict::holds_on_sample;
  std::vector<Witness> witnesses;
  std::string parameters;

  bool holds() const { return verdict == Verdict::holds_on_sample; }
};

namespace detail {

inline void require_unit_interval_valued(const ControlFunction& f, const std::vector<double>& ts) {
  for (double t : ts) {
    if (!f.in_domain(t)) continue;
    const double v = f(t);
    if (v < -tau() || v >= 1.0)
      throw std::invalid_argument("not a [0,1)-valued function");
  }
}

inline PropertyReport window_limsup_check(const ControlFunction& f, const Grid1D& grid,
                                          double window, bool include_zero) {
  if (!(window > 0.0)) throw std::invalid_argument("window must be positive");
  const std::vector<double> ts = grid.points();
  require_unit_interval_valued(f, ts);
  PropertyReport rep;
  rep.property = include_zero ? ControlProperty::mizoguchi_takahashi : ControlProperty::reich;
  std::ostringstream par;
  par << grid.str() << ", window " << window;
  rep.parameters = par.str();
  for (double t : ts) {
    if (t < 0.0) continue;
    if (!include_zero && t <= tau()) continue;
    const double sup = f.window_sup(t, window);
    if (sup > 1.0 - mu) rep.witnesses.push_back({t, sup});
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

}  // namespace detail

// Mizoguchi-Takahashi style condition: sup of f over (t, t+window] stays
// below 1 - mu for every grid point t >= 0, including t = 0.
inline PropertyReport check_MT(const ControlFunction& f, const Grid1D& grid = Grid1D{},
                               double window = 0.1) {
  return detail::window_limsup_check(f, grid, window, /*include_zero=*/true);
}

// Reich style condition: the same windowed bound for every grid point t > 0.
inline PropertyReport check_R(const ControlFunction& f, const Grid1D& grid = Grid1D{},
                              double window = 0.1) {
  return detail::window_limsup_check(f, grid, window, /*include_zero=*/false);
}

// inf{h(s) : s in [a, T_max]} > mu for every a in a_grid. Uses the exact
// piecewise infimum when h declares pieces, a sampled infimum otherwise.
// Witnesses record (a, inf) for every a, so holds-reports stay informative.
inline PropertyReport check_essentially_positive(const ControlFunction& h,
                                                 const std::vector<double>& a_grid,
                                                 const Grid1D& sample) {
  PropertyReport rep;
  rep.property = ControlProperty::essentially_positive;
  std::ostringstream par;
  par << "infima over [a," << std::min(sample.hi, h.domain_hi()) << "], " << sample.str();
  rep.parameters = par.str();
  bool ok = true;
  const double t_max = std::min(sample.hi, h.domain_hi());
  for (double a : a_grid) {
    if (!(a > 0.0)) throw std::invalid_argument("essential positivity needs a > 0");
    double inf;
    if (auto exact = h.piece_inf(a, t_max)) {
      inf = *exact;
    } else {
      inf = infinity();
      for (double s : sample.points())
        if (s >= a - tau() && s <= t_max + tau() && h.in_domain(s)) inf = std::min(inf, h(s));
    }
    rep.witnesses.push_back({a, inf});
    if (!(inf > mu)) ok = false;
  }
  rep.verdict = ok ? Verdict::holds_on_sample : Verdict::violated;
  if (!ok) {
    std::erase_if(rep.witnesses, [](const Witness& w) { return w.value > mu; });
  }
  return rep;
}

// Stable positivity of a pointwise function: wherever h(x) > mu, some
// neighborhood radius from the ladder {r, r/2, r/4} has a sampled infimum
// above mu. Violations are reported with the best achievable infimum; on
// success the single witness records the tightest point seen.
inline PropertyReport check_stably_positive(const std::function<double(const Point&)>& h,
                                            const std::vector<Point>& domain_sample, double r,
                                            const Metric& m) {
  if (!(r > 0.0)) throw std::invalid_argument("stable positivity needs r > 0");
  PropertyReport rep;
  rep.property = ControlProperty::stably_positive;
  std::ostringstream par;
  par << "radius ladder {" << r << "," << r / 2 << "," << r / 4 << "} over " << domain_sample.size()
      << " sampled points";
  rep.parameters = par.str();
  double tightest = infinity();
  double tightest_at = 0.0;
  bool ok = true;
  for (const Point& x : domain_sample) {
    if (!(h(x) > mu)) continue;
    double best = -infinity();
    for (double rr : {r, r / 2.0, r / 4.0})
      best = std::max(best, neighborhood_inf(h, x, rr, domain_sample, m));
    if (!(best > mu)) {
      ok = false;
      rep.witnesses.push_back({x[0], best});
    } else if (best < tightest) {
      tightest = best;
      tightest_at = x[0];
    }
  }
  rep.verdict = ok ? Verdict::holds_on_sample : Verdict::violated;
  if (ok && std::isfinite(tightest)) rep.witnesses.push_back({tightest_at, tightest});
  return rep;
}

// p(s) = s - (1-s) * gamma(s) on gamma's domain. Piece descriptors carry over
// when gamma is piecewise constant: a constant piece c becomes the affine
// piece (1+c) s - c, and point values transform pointwise. Affine gamma
// pieces would need quadratic shapes, so they fall back to evaluation only.
inline ControlFunction p_from_gamma(const ControlFunction& gamma) {
  const std::string label = "p[" + gamma.label() + "]";
  bool piecewise_constant = gamma.pieces().has_value();
  if (piecewise_constant)
    for (const Piece& p : *gamma.pieces())
      if (p.shape.kind != Shape::Kind::constant) piecewise_constant = false;
  if (piecewise_constant) {
    std::vector<Piece> out;
    for (const Piece& p : *gamma.pieces()) {
      Piece q = p;
      if (p.is_point()) {
        q.shape = Shape::constant(p.lo - (1.0 - p.lo) * p.shape.b);
      } else {
        const double c = p.shape.b;
        q.shape = Shape::affine(1.0 + c, -c);
      }
      out.push_back(q);
    }
    return ControlFunction::from_pieces(label, RangeContract::generic, std::move(out));
  }
  ControlFunction g = gamma;
  return ControlFunction::from_eval(label, RangeContract::generic,
                                    [g](double s) { return s - (1.0 - s) * g(s); });
}

// t -> 1 + gamma(1 - beta(t)). Constant beta pieces transform exactly.
inline ControlFunction alpha_bound_from(const ControlFunction& beta,
                                        const ControlFunction& gamma) {
  const std::string label = "1+" + gamma.label() + "(1-" + beta.label() + ")";
  bool piecewise_constant = beta.pieces().has_value();
  if (piecewise_constant)
    for (const Piece& p : *beta.pieces())
      if (p.shape.kind != Shape::Kind::constant) piecewise_constant = false;
  if (piecewise_constant) {
    std::vector<Piece> out;
    for (const Piece& p : *beta.pieces()) {
      const double bv = p.shape.b;
      if (bv >= 1.0)
        throw std::invalid_argument("beta value >= 1 in alpha_bound_from");
      Piece q = p;
      q.shape = Shape::constant(1.0 + gamma(1.0 - bv));
      out.push_back(q);
    }
    return ControlFunction::from_pieces(label, RangeContract::alpha, std::move(out));
  }
  ControlFunction b = beta;
  ControlFunction g = gamma;
  return ControlFunction::from_eval(label, RangeContract::alpha, [b, g](double t) {
    const double bv = b(t);
    if (bv >= 1.0)
      throw std::invalid_argument("beta value >= 1 in alpha_bound_from at t=" + std::to_string(t));
    return 1.0 + g(1.0 - bv);
  });
}

// gamma_m(s) = s + s^2 + ... + s^m on (0,1].
inline ControlFunction gamma_poly_family(int m) {
  if (m < 1) throw std::invalid_argument("polynomial family needs m >= 1");
  if (m == 1)
    return ControlFunction::from_pieces("gamma_poly(1)", RangeContract::gamma,
                                        {Piece::interval(0.0, 1.0, false, true, Shape::affine(1.0, 0.0))});
  return ControlFunction::from_eval("gamma_poly(" + std::to_string(m) + ")", RangeContract::gamma,
                                    [m](double s) {
                                      double acc = 0.0;
                                      for (int k = 0; k < m; ++k) acc = s * (acc + 1.0);
                                      return acc;
                                    });
}

// Pointwise product with exact piece refinement when both factors are
// piecewise and the product shapes stay within {constant, affine}. Every
// refined breakpoint becomes a point piece holding the exact product value,
// which sidesteps boundary-ownership reconciliation between the factors.
inline ControlFunction product_control(const ControlFunction& f, const ControlFunction& g) {
  const std::string label = f.label() + "*" + g.label();
  const auto shape_at = [](const ControlFunction& h, double t) -> const Shape* {
    for (const Piece& p : *h.pieces())
      if (!p.is_point() && t > p.lo && t < p.hi) return &p.shape;
    return nullptr;
  };
  if (f.pieces() && g.pieces() && f.domain_lo() == g.domain_lo() &&
      f.domain_lo_open() == g.domain_lo_open()) {
    const double lo = f.domain_lo();
    const double hi = std::min(f.domain_hi(), g.domain_hi());
    std::vector<double> cuts{lo};
    for (const auto* cf : {&f, &g})
      for (const Piece& p : *cf->pieces()) {
        if (p.lo > lo && p.lo < hi) cuts.push_back(p.lo);
        if (p.hi > lo && p.hi < hi && std::isfinite(p.hi)) cuts.push_back(p.hi);
      }
    if (std::isfinite(hi)) cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) <= tau(); }),
               cuts.end());
    std::vector<Piece> out;
    bool representable = true;
    const bool lo_open = f.domain_lo_open();
    for (std::size_t i = 0; i < cuts.size() && representable; ++i) {
      if (!(i == 0 && lo_open)) out.push_back(Piece::point(cuts[i], f(cuts[i]) * g(cuts[i])));
      const bool last = i + 1 >= cuts.size();
      if (last && std::isfinite(hi)) break;  // domain ends at this cut
      const double seg_lo = cuts[i];
      const double seg_end = last ? infinity() : cuts[i + 1];
      const double probe = last ? seg_lo + 1.0 : 0.5 * (seg_lo + seg_end);
      const Shape* sf = shape_at(f, probe);
      const Shape* sg = shape_at(g, probe);
      if (sf == nullptr || sg == nullptr) {
        representable = false;
        break;
      }
      Shape prod;
      if (sf->kind == Shape::Kind::constant && sg->kind == Shape::Kind::constant) {
        prod = Shape::constant(sf->b * sg->b);
      } else if (sf->kind == Shape::Kind::constant) {
        prod = Shape::affine(sf->b * sg->a, sf->b * sg->b);
      } else if (sg->kind == Shape::Kind::constant) {
        prod = Shape::affine(sg->b * sf->a, sg->b * sf->b);
      } else {
        representable = false;  // quadratic product is outside the shape vocabulary
        break;
      }
      out.push_back(Piece::interval(seg_lo, seg_end, false, last, prod));
    }
    if (representable && !out.empty())
      return ControlFunction::from_pieces(label, RangeContract::generic, std::move(out));
  }
  ControlFunction a = f;
  ControlFunction b = g;
  return ControlFunction::from_eval(label, RangeContract::generic,
                                    [a, b](double t) { return a(t) * b(t); });
}

// Certificate for the product chain alpha(s)beta(s) <= 1 - p(1-beta(s))
// together with the windowed condition on the product. The hypothesis
// alpha <= 1 + gamma(1-beta) is a precondition: its failure anywhere on the
// grid is a hard error, not a verdict.
inline PropertyReport lemma21_certificate(const ControlFunction& alpha,
                                          const ControlFunction& beta,
                                          const ControlFunction& gamma,
                                          const Grid1D& grid = Grid1D{}) {
  const ControlFunction p = p_from_gamma(gamma);
  PropertyReport rep;
  rep.property = ControlProperty::mizoguchi_takahashi;
  rep.parameters = "certificate chain on " + grid.str() + "; windowed product condition";
  bool product_in_range = true;
  for (double t : grid.points()) {
    const double av = alpha(t);
    const double bv = beta(t);
    if (bv >= 1.0) throw std::invalid_argument("beta value >= 1 at t=" + std::to_string(t));
    const double bound = 1.0 + gamma(1.0 - bv);
    if (av > bound + tau())
      throw std::invalid_argument("hypothesis (2) fails at t=" + std::to_string(t));
    const double chain = 1.0 - p(1.0 - bv);
    if (av * bv > chain + tau()) rep.witnesses.push_back({t, av * bv - chain});
    if (av * bv >= 1.0 && product_in_range) {
      rep.witnesses.push_back({t, av * bv});
      product_in_range = false;
    }
  }
  if (product_in_range) {
    const PropertyReport mt = check_MT(product_control(alpha, beta));
    for (const Witness& w : mt.witnesses) rep.witnesses.push_back(w);
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

// Sampled sup of alpha*beta over the grid points where alpha(t) >= 1 + eps.
// Returns -infinity when the sampled preimage is empty. When requested,
// lemma_ceiling receives the certificate bound 1 - min p(1 - beta(t)) over
// the same preimage.
inline double q_epsilon(const ControlFunction& alpha, const ControlFunction& beta,
                        const ControlFunction& p, double eps, const Grid1D& grid = Grid1D{},
                        double* lemma_ceiling = nullptr) {
  if (!(eps > 0.0)) throw std::invalid_argument("q_epsilon needs eps > 0");
  double sup = -infinity();
  double min_p = infinity();
  for (double t : grid.points()) {
    const double av = alpha(t);
    if (av < 1.0 + eps - tau()) continue;
    const double bv = beta(t);
    sup = std::max(sup, av * bv);
    const double u = 1.0 - bv;
    if (p.in_domain(u)) min_p = std::min(min_p, p(u));
  }
  if (lemma_ceiling != nullptr)
    *lemma_ceiling = std::isfinite(min_p) ? 1.0 - min_p : -infinity();
  return sup;
}

}  // namespace contractum
