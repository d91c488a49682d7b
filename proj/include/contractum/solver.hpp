#pragma once

// Iteration driver built on the selection step, with per-theorem
// precondition validation, trace invariant checks, and classification of the
// limiting behavior of non-convergent traces.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contractum/config.hpp"
#include "contractum/control.hpp"
#include "contractum/metric.hpp"
#include "contractum/multimap.hpp"

namespace contractum {

enum class TheoremMode { t14, t15, t16 };

inline std::string to_string(TheoremMode m) {
  switch (m) {
    case TheoremMode::t14: return "t14";
    case TheoremMode::t15: return "t15";
    case TheoremMode::t16: return "t16";
  }
  return "?";
}

// Hypothesis bundle for one convergence-theorem mode. t14 couples the
// controls through gamma; t15 relies on the product condition with a
// nonincreasing alpha; t16 uses a power-law decay of the product near 0 on a
// declared neighborhood (0, radius].
struct TheoremSpec {
  TheoremMode mode = TheoremMode::t14;
  ControlFunction alpha;
  ControlFunction beta;
  std::optional<ControlFunction> gamma;
  double t16_C = 0.0;
  double t16_p = 0.0;
  double t16_radius = 1.0;

  static TheoremSpec t14(ControlFunction alpha, ControlFunction beta, ControlFunction gamma) {
    return {TheoremMode::t14, std::move(alpha), std::move(beta), std::move(gamma), 0.0, 0.0, 1.0};
  }
  static TheoremSpec t15(ControlFunction alpha, ControlFunction beta) {
    return {TheoremMode::t15, std::move(alpha), std::move(beta), std::nullopt, 0.0, 0.0, 1.0};
  }
  static TheoremSpec t16(ControlFunction alpha, ControlFunction beta, double C, double p,
                         double radius = 1.0) {
    return {TheoremMode::t16, std::move(alpha), std::move(beta), std::nullopt, C, p, radius};
  }
};

struct PreconditionReport {
  TheoremMode mode = TheoremMode::t14;
  bool satisfied = false;
  std::vector<std::string> notes;  // one label per entry of checks
  std::vector<PropertyReport> checks;
  double C_sup_alpha = 0.0;
};

namespace detail {

inline PropertyReport nonincreasing_check(const ControlFunction& f, const Grid1D& grid) {
  PropertyReport rep;
  rep.property = ControlProperty::nonincreasing;
  rep.parameters = grid.str();
  bool first = true;
  double prev = 0.0;
  for (double t : grid.points()) {
    if (!f.in_domain(t)) continue;
    const double v = f(t);
    if (!first && v > prev + tau()) rep.witnesses.push_back({t, v - prev});
    prev = v;
    first = false;
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

// Boundedness of gamma on (0,1] plus the vanishing limit at 0+, probed at a
// fixed ladder of near-zero abscissae.
inline PropertyReport gamma_vanishing_check(const ControlFunction& gamma) {
  PropertyReport rep;
  rep.property = ControlProperty::bounded;
  const double sup = gamma.sup_on_grid(Grid1D{1e-3, 1.0, 1e-3, {}});
  std::ostringstream par;
  par << "sup on (0,1] grid = " << sup << "; limit probes at {1e-10,1e-11,1e-12}";
  rep.parameters = par.str();
  bool ok = std::isfinite(sup);
  for (double s : {1e-10, 1e-11, 1e-12}) {
    const double v = gamma(s);
    if (!(v <= mu)) {
      ok = false;
      rep.witnesses.push_back({s, v});
    }
  }
  rep.verdict = ok ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

inline PropertyReport bounded_check(const ControlFunction& f, const Grid1D& grid) {
  PropertyReport rep;
  rep.property = ControlProperty::bounded;
  const double sup = f.sup_on_grid(grid);
  std::ostringstream par;
  par << "sup over " << grid.str() << " = " << sup;
  rep.parameters = par.str();
  rep.verdict = std::isfinite(sup) ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

// alpha*beta <= 1 - C*t^p on (0, radius].
inline PropertyReport power_decay_check(const ControlFunction& alpha, const ControlFunction& beta,
                                        double C, double p, double radius) {
  PropertyReport rep;
  rep.property = ControlProperty::mizoguchi_takahashi;
  std::ostringstream par;
  par << "alpha*beta <= 1 - " << C << "*t^" << p << " on (0," << radius << "]";
  rep.parameters = par.str();
  const Grid1D grid{0.0, radius, 1e-3, {}};
  for (double t : grid.points()) {
    if (t <= tau()) continue;
    const double v = alpha(t) * beta(t);
    const double bound = 1.0 - C * std::pow(t, p);
    if (v > bound + tau()) rep.witnesses.push_back({t, v - bound});
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return rep;
}

}  // namespace detail

inline PreconditionReport validate_preconditions(const TheoremSpec& spec,
                                                 const Grid1D& grid = Grid1D{}) {
  PreconditionReport rep;
  rep.mode = spec.mode;
  rep.C_sup_alpha = spec.alpha.sup_on_grid(grid);
  const auto push = [&rep](std::string note, PropertyReport pr) {
    rep.notes.push_back(std::move(note));
    rep.checks.push_back(std::move(pr));
  };
  switch (spec.mode) {
    case TheoremMode::t14: {
      if (!spec.gamma) throw std::invalid_argument("t14 needs gamma");
      push("beta windowed limsup below 1 (incl. t=0)", check_MT(spec.beta, grid));
      try {
        push("product certificate chain", lemma21_certificate(spec.alpha, spec.beta, *spec.gamma, grid));
      } catch (const std::invalid_argument& e) {
        PropertyReport failed;
        failed.property = ControlProperty::mizoguchi_takahashi;
        failed.verdict = Verdict::violated;
        failed.parameters = e.what();
        push("product certificate chain", std::move(failed));
      }
      push("gamma bounded with vanishing limit at 0+", detail::gamma_vanishing_check(*spec.gamma));
      push("p essentially positive",
           check_essentially_positive(p_from_gamma(*spec.gamma),
                                      {1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.5, 0.75, 1.0},
                                      Grid1D{0.0, 1.0, 1e-3, {}}));
      break;
    }
    case TheoremMode::t15: {
      push("product windowed limsup below 1 (incl. t=0)",
           check_MT(product_control(spec.alpha, spec.beta), grid));
      push("alpha nonincreasing", detail::nonincreasing_check(spec.alpha, grid));
      break;
    }
    case TheoremMode::t16: {
      if (!(spec.t16_C > 0.0)) throw std::invalid_argument("t16 needs C > 0");
      if (!(spec.t16_p > 0.0 && spec.t16_p < 1.0))
        throw std::invalid_argument("t16 needs p in (0,1)");
      if (!(spec.t16_radius > 0.0)) throw std::invalid_argument("t16 needs radius > 0");
      push("alpha bounded", detail::bounded_check(spec.alpha, grid));
      push("power-law product decay near 0",
           detail::power_decay_check(spec.alpha, spec.beta, spec.t16_C, spec.t16_p,
                                     spec.t16_radius));
      break;
    }
  }
  rep.satisfied = true;
  for (const PropertyReport& pr : rep.checks)
    if (!pr.holds()) rep.satisfied = false;
  return rep;
}

struct StopPolicy {
  double eps_fp = 1e-9;       // d_F threshold declaring a fixed point reached
  std::size_t max_steps = 10000;
};

enum class StopReason { converged, max_steps, selection_failed, monotonicity_violated };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_steps: return "max_steps";
    case StopReason::selection_failed: return "selection_failed";
    case StopReason::monotonicity_violated: return "monotonicity_violated";
  }
  return "?";
}

struct IterationTrace {
  Point start;
  Point last;
  std::vector<SelectionRecord> steps;
  StopReason reason = StopReason::max_steps;
  double delta_est = 0.0;  // trailing value of d_F along the trace
  double nabla_est = 0.0;  // smallest step length over the final quartile
  std::optional<SelectionRecord> failure_near_miss;
};

// Runs the selection dynamics from x0. Convergence is declared before
// stepping whenever d_F(x) <= eps_fp. A step that strictly increases d_F
// (beyond tau) is recorded and then aborts the run, as does a selection
// failure (whose least-bad candidate is preserved).
inline IterationTrace iterate(const MultivaluedMap& F, const Point& x0,
                              const ControlFunction& alpha, const ControlFunction& beta,
                              const Metric& m, const StopPolicy& policy = StopPolicy{}) {
  IterationTrace trace{x0, x0, {}, StopReason::max_steps, 0.0, 0.0, std::nullopt};
  Point x = x0;
  for (std::size_t n = 0; n < policy.max_steps; ++n) {
    if (d_F(F, x, m) <= policy.eps_fp) {
      trace.reason = StopReason::converged;
      break;
    }
    SelectionRecord rec{x, x, 0, 0, 0, 0, 0};
    try {
      rec = select_step(F, x, alpha, beta, m);
    } catch (const selection_error& e) {
      trace.reason = StopReason::selection_failed;
      trace.failure_near_miss = e.near_miss();
      break;
    }
    const bool increased = rec.dF_y > rec.dF_x + tau();
    trace.steps.push_back(std::move(rec));
    if (increased) {
      trace.reason = StopReason::monotonicity_violated;
      break;
    }
    x = trace.steps.back().y;
  }
  if (trace.reason == StopReason::max_steps && d_F(F, x, m) <= policy.eps_fp)
    trace.reason = StopReason::converged;
  trace.last = trace.steps.empty() ? x0 : trace.steps.back().y;
  trace.delta_est = trace.steps.empty() ? d_F(F, x0, m) : trace.steps.back().dF_y;
  if (!trace.steps.empty()) {
    const std::size_t q = trace.steps.size() - std::max<std::size_t>(1, trace.steps.size() / 4);
    double nabla = infinity();
    for (std::size_t i = q; i < trace.steps.size(); ++i)
      nabla = std::min(nabla, trace.steps[i].d_xy);
    trace.nabla_est = nabla;
  }
  return trace;
}

// Invariants every well-formed trace must satisfy: d_F strictly decreases
// along recorded steps (plain float comparison once above noise level mu),
// and each step length is sandwiched between d_F(x_n) and C * d_F(x_n) with
// C the supremum of alpha.
inline std::vector<PropertyReport> trace_invariants(const IterationTrace& trace,
                                                    double C_sup_alpha) {
  PropertyReport mono;
  mono.property = ControlProperty::nonincreasing;
  mono.parameters = "strict decrease of d_F along " + std::to_string(trace.steps.size()) + " steps";
  PropertyReport sandwich;
  sandwich.property = ControlProperty::bounded;
  std::ostringstream par;
  par << "d_F(x_n) <= d_n <= C*d_F(x_n) with C = " << C_sup_alpha;
  sandwich.parameters = par.str();
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    const SelectionRecord& rec = trace.steps[n];
    const double idx = static_cast<double>(n);
    if (rec.dF_x > mu && !(rec.dF_y < rec.dF_x)) mono.witnesses.push_back({idx, rec.dF_y});
    if (rec.d_xy < rec.dF_x - tau() || rec.d_xy > C_sup_alpha * rec.dF_x + tau())
      sandwich.witnesses.push_back({idx, rec.d_xy});
  }
  mono.verdict = mono.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  sandwich.verdict = sandwich.witnesses.empty() ? Verdict::holds_on_sample : Verdict::violated;
  return {std::move(mono), std::move(sandwich)};
}

enum class LimitCase { case_I, case_II, case_III };

inline std::string to_string(LimitCase c) {
  switch (c) {
    case LimitCase::case_I: return "I";
    case LimitCase::case_II: return "II";
    case LimitCase::case_III: return "III";
  }
  return "?";
}

// Splits limiting behavior by Delta = trailing d_F and Nabla = the smallest
// recent step length: III when d_F vanishes (or the run converged), I when
// steps stay bounded away from Delta, II when the two merge.
inline LimitCase classify_limit_case(const IterationTrace& trace) {
  if (trace.reason == StopReason::converged) return LimitCase::case_III;
  if (trace.steps.size() < 10)
    throw std::invalid_argument("trace too short to classify");
  const double delta = trace.steps.back().dF_y;
  const std::size_t q = trace.steps.size() - std::max<std::size_t>(1, trace.steps.size() / 4);
  double nabla = infinity();
  for (std::size_t i = q; i < trace.steps.size(); ++i)
    nabla = std::min(nabla, trace.steps[i].d_xy);
  if (delta <= mu) return LimitCase::case_III;
  if (nabla - delta > mu) return LimitCase::case_I;
  return LimitCase::case_II;
}

// d_F(x) <= eps; the achieved distance is reported through dist_out when
// requested.
inline bool verify_fixed_point(const MultivaluedMap& F, const Point& x, const Metric& m,
                               double eps = 1e-9, double* dist_out = nullptr) {
  const double d = d_F(F, x, m);
  if (dist_out != nullptr) *dist_out = d;
  return d <= eps;
}

}  // namespace contractum
