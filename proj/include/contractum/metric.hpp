#pragma once

// Finite metric geometry: points in R^d, metrics with a sampled axiom check,
// nonempty finite point sets, point-to-set distance, Hausdorff distance and
// sampled neighborhood infima.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contractum/config.hpp"

namespace contractum {

class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }
  Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }

  static Point scalar(double x) { return Point{x}; }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

  // First coordinate; the common case throughout is d == 1.
  double x() const { return coords_.at(0); }

  friend bool operator==(const Point& a, const Point& b) { return a.coords_ == b.coords_; }

  std::string str() const {
    std::ostringstream os;
    if (dim() == 1) {
      os << coords_[0];
    } else {
      os << '(';
      for (std::size_t i = 0; i < coords_.size(); ++i) os << (i ? "," : "") << coords_[i];
      os << ')';
    }
    return os.str();
  }

 private:
  void validate() const {
    if (coords_.empty()) throw std::invalid_argument("point must have at least one coordinate");
    for (double c : coords_)
      if (!std::isfinite(c)) throw std::invalid_argument("non-finite point coordinate");
  }

  std::vector<double> coords_;
};

inline bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.coords().begin(), a.coords().end(), b.coords().begin(),
                                      b.coords().end());
}

// Coordinatewise closeness; used for tolerance-based identity, not distances.
inline bool coords_within(const Point& a, const Point& b, double tol) {
  if (a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

struct Metric {
  std::string name;
  std::function<double(const Point&, const Point&)> eval;

  double operator()(const Point& a, const Point& b) const { return eval(a, b); }

  static Metric euclidean() {
    return Metric{"euclidean", [](const Point& a, const Point& b) {
                    if (a.dim() != b.dim())
                      throw std::invalid_argument("metric arguments of mismatched dimension");
                    double s = 0.0;
                    for (std::size_t i = 0; i < a.dim(); ++i) {
                      const double d = a[i] - b[i];
                      s += d * d;
                    }
                    return std::sqrt(s);
                  }};
  }

  // |x - y| on the real line.
  static Metric absolute() {
    return Metric{"absolute", [](const Point& a, const Point& b) {
                    if (a.dim() != 1 || b.dim() != 1)
                      throw std::invalid_argument("absolute metric is one-dimensional");
                    return std::abs(a.x() - b.x());
                  }};
  }

  // Wraps a user-supplied callable after checking the metric axioms on the
  // sampled points: identity, non-negativity, symmetry and the triangle
  // inequality, all within tau.
  static Metric checked(std::string name, std::function<double(const Point&, const Point&)> fn,
                        const std::vector<Point>& sample) {
    if (sample.empty()) throw std::invalid_argument("metric axiom check needs a nonempty sample");
    for (const Point& x : sample) {
      if (std::abs(fn(x, x)) > tau())
        throw std::invalid_argument("metric axiom failure: d(x,x) != 0 at x=" + x.str());
      for (const Point& y : sample) {
        const double dxy = fn(x, y);
        if (!std::isfinite(dxy) || dxy < -tau())
          throw std::invalid_argument("metric axiom failure: d(x,y) < 0");
        if (std::abs(dxy - fn(y, x)) > tau())
          throw std::invalid_argument("metric axiom failure: asymmetric at x=" + x.str() +
                                      ", y=" + y.str());
        for (const Point& z : sample)
          if (fn(x, z) > dxy + fn(y, z) + tau())
            throw std::invalid_argument("metric axiom failure: triangle inequality at x=" +
                                        x.str() + ", y=" + y.str() + ", z=" + z.str());
      }
    }
    return Metric{std::move(name), std::move(fn)};
  }
};

// Nonempty finite point set, lexicographically sorted and deduplicated
// under tau. All members share one dimension.
class FiniteClosedSet {
 public:
  explicit FiniteClosedSet(std::vector<Point> pts) : pts_(std::move(pts)) {
    if (pts_.empty()) throw std::invalid_argument("empty value set");
    for (const Point& p : pts_)
      if (p.dim() != pts_.front().dim())
        throw std::invalid_argument("value set mixes dimensions");
    std::sort(pts_.begin(), pts_.end(), lex_less);
    std::vector<Point> unique;
    for (const Point& p : pts_) {
      bool dup = false;
      for (const Point& q : unique)
        if (coords_within(p, q, tau())) {
          dup = true;
          break;
        }
      if (!dup) unique.push_back(p);
    }
    pts_ = std::move(unique);
  }

  static FiniteClosedSet of(std::initializer_list<double> xs) {
    std::vector<Point> pts;
    for (double v : xs) pts.push_back(Point::scalar(v));
    return FiniteClosedSet(std::move(pts));
  }

  const std::vector<Point>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  std::size_t dim() const { return pts_.front().dim(); }

  bool contains(const Point& x) const {
    for (const Point& p : pts_)
      if (coords_within(p, x, tau())) return true;
    return false;
  }

 private:
  std::vector<Point> pts_;
};

// dist(x, A) = min over the members of A.
inline double dist_point_set(const Point& x, const FiniteClosedSet& A, const Metric& m) {
  double best = infinity();
  for (const Point& a : A.points()) best = std::min(best, m(x, a));
  return best;
}

// Hausdorff distance between two nonempty finite sets: the larger of the two
// directed deviations sup_{a in A} dist(a,B) and sup_{b in B} dist(b,A).
inline double hausdorff(const FiniteClosedSet& A, const FiniteClosedSet& B, const Metric& m) {
  double forward = 0.0;
  for (const Point& a : A.points()) forward = std::max(forward, dist_point_set(a, B, m));
  double backward = 0.0;
  for (const Point& b : B.points()) backward = std::max(backward, dist_point_set(b, A, m));
  return std::max(forward, backward);
}

// Minimum of h over the sampled part of the radius-r neighborhood of x,
// always including x itself. The sample is filtered to the neighborhood;
// points at distance exactly r are kept (within tau).
inline double neighborhood_inf(const std::function<double(const Point&)>& h, const Point& x,
                               double r, const std::vector<Point>& sample, const Metric& m) {
  if (r <= 0.0) throw std::invalid_argument("neighborhood radius must be positive");
  if (sample.empty()) throw std::invalid_argument("empty sample");
  double best = h(x);
  for (const Point& p : sample)
    if (m(x, p) <= r + tau()) best = std::min(best, h(p));
  return best;
}

// Uniform one-dimensional grid [lo, hi] with optional exact extra abscissae
// (breakpoints that the uniform grid would miss).
struct Grid1D {
  double lo = 0.0;
  double hi = 2.0;
  double step = 1e-3;
  std::vector<double> extra;

  std::vector<double> points() const {
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad grid specification");
    std::vector<double> pts;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
    pts.reserve(n + 1 + extra.size());
    for (std::size_t k = 0; k <= n; ++k) {
      const double v = lo + static_cast<double>(k) * step;
      if (v > hi + tau()) break;
      pts.push_back(v);
    }
    if (std::abs(pts.back() - hi) > tau()) pts.push_back(hi);
    for (double e : extra)
      if (e >= lo - tau() && e <= hi + tau()) pts.push_back(e);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) <= tau(); }),
              pts.end());
    return pts;
  }

  std::string str() const {
    std::ostringstream os;
    os << "grid [" << lo << "," << hi << "] step " << step;
    if (!extra.empty()) os << " plus " << extra.size() << " breakpoints";
    return os.str();
  }
};

inline std::vector<Point> grid_points_1d(const Grid1D& g) {
  std::vector<Point> pts;
  for (double t : g.points()) pts.push_back(Point::scalar(t));
  return pts;
}

}  // namespace contractum
