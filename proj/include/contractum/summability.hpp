#pragma once

// The scalar recursion t_{n+1} = phi(t_n) * t_n driven by a decay majorant
// phi, the closed-form envelope (p*C*n + t0^-p)^(-1/p) valid for
// phi(t) = 1 - C*t^p, and a heuristic summability verdict for the resulting
// sequences (geometric tail ratio, escalating to a log-log exponent fit).

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contractum/config.hpp"
#include "contractum/control.hpp"

namespace contractum {

struct PhiSequence {
  std::vector<double> values;  // values[0] is the seed t0
  // Index at which the recursion dropped below tau and stopped; values up to
  // truncated_at-1 are recorded.
  std::optional<std::size_t> truncated_at;
};

// phi(t) = 1 - C*t^p, positive exactly on (0, (1/C)^(1/p)); the upper edge is
// recorded as the validity bound.
inline ControlFunction phi_power(double C, double p) {
  if (!(C > 0.0)) throw std::invalid_argument("phi_power needs C > 0");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("phi_power needs p in (0,1)");
  std::ostringstream label;
  label << "1-" << C << "*t^" << p;
  ControlFunction phi = ControlFunction::from_eval(
      label.str(), RangeContract::generic, [C, p](double t) { return 1.0 - C * std::pow(t, p); });
  phi.validity_hi = std::pow(1.0 / C, 1.0 / p);
  return phi;
}

// Runs the recursion for up to N steps. The seed must be positive and, when
// the majorant declares a validity edge, strictly inside it. Every evaluated
// phi value must stay in (0,1); the run stops early once the iterate falls
// below tau, recording the truncation index.
inline PhiSequence phi_sequence(const ControlFunction& phi, double t0, std::size_t N) {
  if (!(t0 > 0.0)) throw std::invalid_argument("phi recursion needs t0 > 0");
  if (phi.validity_hi && !(t0 < *phi.validity_hi))
    throw std::invalid_argument("t0 lies outside the majorant validity interval");
  PhiSequence seq;
  seq.values.reserve(N + 1);
  seq.values.push_back(t0);
  double t = t0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double f = phi(t);
    if (!(f > 0.0 && f < 1.0))
      throw std::invalid_argument("majorant leaves (0,1) at t=" + std::to_string(t));
    t = f * t;
    if (t < tau()) {
      seq.truncated_at = n;
      break;
    }
    seq.values.push_back(t);
  }
  return seq;
}

inline double phi_bound(double C, double p, double t0, std::size_t n) {
  return std::pow(p * C * static_cast<double>(n) + std::pow(t0, -p), -1.0 / p);
}

// Two invariants of the power-majorant recursion: the closed-form envelope
// values[n] <= (p*C*n + t0^-p)^(-1/p), and the per-step growth
// values[k+1]^-p - values[k]^-p >= p*C (Bernoulli), both within tau.
inline std::vector<PropertyReport> bound_check(const PhiSequence& seq, double C, double p,
                                               double t0) {
  if (seq.values.empty() || std::abs(seq.values.front() - t0) > tau())
    throw std::invalid_argument("sequence does not start at t0");
  PropertyReport envelope;
  envelope.property = ControlProperty::bounded;
  {
    std::ostringstream par;
    par << "phi_n <= (" << p * C << "*n + " << std::pow(t0, -p) << ")^(-1/" << p << ")";
    envelope.parameters = par.str();
  }
  PropertyReport increments;
  increments.property = ControlProperty::bounded;
  {
    std::ostringstream par;
    par << "phi^-p increments >= p*C = " << p * C;
    increments.parameters = par.str();
  }
  for (std::size_t n = 0; n < seq.values.size(); ++n) {
    const double bound = phi_bound(C, p, t0, n);
    if (seq.values[n] > bound + tau())
      envelope.witnesses.push_back({static_cast<double>(n), seq.values[n] - bound});
  }
  for (std::size_t k = 0; k + 1 < seq.values.size(); ++k) {
    const double inc = std::pow(seq.values[k + 1], -p) - std::pow(seq.values[k], -p);
    if (!(inc > p * C - tau()))
      increments.witnesses.push_back({static_cast<double>(k), inc});
  }
  envelope.verdict = envelope.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  increments.verdict = increments.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return {std::move(envelope), std::move(increments)};
}

enum class SummabilityVerdict { summable, diverging, inconclusive };

inline std::string to_string(SummabilityVerdict v) {
  switch (v) {
    case SummabilityVerdict::summable: return "summable";
    case SummabilityVerdict::diverging: return "diverging";
    case SummabilityVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct SummabilityReport {
  SummabilityVerdict verdict = SummabilityVerdict::inconclusive;
  std::string method;     // "tail_ratio" or "bound_fit"
  double tail_ratio = 0.0;
  double exponent = 0.0;  // fitted decay exponent (bound_fit only)
  std::string parameters;
};

// Largest consecutive ratio below this proves geometric domination of the
// tail: a polynomially decaying tail n^-e with e <= 1 keeps every ratio of
// 50+-term windows above 1 - 1/50 = 0.98.
inline constexpr double geometric_ratio_cap = 0.97;

// Decides whether the series sum phi_n converges. A geometric tail (largest
// consecutive ratio over the last half at most geometric_ratio_cap) is
// summable outright; otherwise the decay exponent e of phi_n ~ n^-e is
// fitted by least squares on the log-log tail: e > 1 means summable,
// e <= 1 diverging, the sliver between is left inconclusive. Requires at
// least 100 terms unless the recursion already truncated at tau.
inline SummabilityReport summability_verdict(const PhiSequence& seq) {
  if (seq.values.size() < 100 && !seq.truncated_at)
    throw std::invalid_argument("summability needs at least 100 terms or a truncated run");
  SummabilityReport rep;
  const std::size_t n = seq.values.size();
  const std::size_t half = n / 2;
  double ratio = 0.0;
  for (std::size_t k = half; k + 1 < n; ++k) ratio = std::max(ratio, seq.values[k + 1] / seq.values[k]);
  rep.tail_ratio = ratio;
  std::ostringstream par;
  par << "tail of " << n - half << " terms";
  rep.parameters = par.str();
  if (ratio <= geometric_ratio_cap) {
    rep.verdict = SummabilityVerdict::summable;
    rep.method = "tail_ratio";
    return rep;
  }
  rep.method = "bound_fit";
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t k = std::max<std::size_t>(half, 1); k < n; ++k) {
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(seq.values[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double denom = static_cast<double>(count) * sxx - sx * sx;
  if (count < 10 || std::abs(denom) < mu_den) {
    rep.verdict = SummabilityVerdict::inconclusive;
    return rep;
  }
  const double slope = (static_cast<double>(count) * sxy - sx * sy) / denom;
  rep.exponent = -slope;
  if (rep.exponent > 1.0 + mu)
    rep.verdict = SummabilityVerdict::summable;
  else if (rep.exponent <= 1.0)
    rep.verdict = SummabilityVerdict::diverging;
  else
    rep.verdict = SummabilityVerdict::inconclusive;
  return rep;
}

// Columns: n, phi_n, the closed-form bound, and the running partial sum.
inline void write_phi_csv(std::ostream& os, const PhiSequence& seq, double C, double p,
                          double t0) {
  os << "n,phi_n,bound_n,partial_sum\n";
  os << std::setprecision(17);
  double sum = 0.0;
  for (std::size_t n = 0; n < seq.values.size(); ++n) {
    sum += seq.values[n];
    os << n << ',' << seq.values[n] << ',' << phi_bound(C, p, t0, n) << ',' << sum << '\n';
  }
}

}  // namespace contractum
