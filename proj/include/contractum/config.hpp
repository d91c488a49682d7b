#pragma once

// Global numeric policy. All quantities are double precision. Comparisons
// against exact values use the equality tolerance tau(); strict inequalities
// are only credited when they hold by at least the margin mu.

#include <cmath>
#include <cstdlib>
#include <limits>

namespace contractum {

namespace detail {
inline double read_tau_from_env() {
  if (const char* s = std::getenv("CONTRACTUM_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end != s && v > 0.0 && std::isfinite(v)) return v;
  }
  return 1e-12;
}
}  // namespace detail

// Equality tolerance. Overridable through the CONTRACTUM_TOL environment
// variable; read once per process.
inline double tau() {
  static const double t = detail::read_tau_from_env();
  return t;
}

// Margin required for a strict inequality "u < v" to count as satisfied.
inline constexpr double mu = 1e-9;

// Guard against division by a vanishing denominator.
inline constexpr double mu_den = 1e-9;

inline double infinity() { return std::numeric_limits<double>::infinity(); }

// u == v within tau.
inline bool approx_eq(double u, double v) { return std::abs(u - v) <= tau(); }

// u <= v within tau.
inline bool approx_le(double u, double v) { return u <= v + tau(); }

// u < v with margin mu.
inline bool strictly_less(double u, double v) { return v - u > mu; }

}  // namespace contractum
