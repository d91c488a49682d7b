#pragma once

// JSON serialization for controls, maps, traces, and reports. Piecewise
// structures are written without closure booleans; closures are implied by
// one fixed convention (documented at the serializers), and values that do
// not fit the convention are refused rather than silently altered. All
// output is deterministic: no timestamps, keys in sorted order.

#include <json.hpp>

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contractum/config.hpp"
#include "contractum/control.hpp"
#include "contractum/corpus.hpp"
#include "contractum/multimap.hpp"
#include "contractum/solver.hpp"
#include "contractum/summability.hpp"

namespace contractum {

using json = nlohmann::ordered_json;

inline RangeContract range_contract_from_string(const std::string& s) {
  if (s == "alpha") return RangeContract::alpha;
  if (s == "beta") return RangeContract::beta;
  if (s == "gamma") return RangeContract::gamma;
  if (s == "generic") return RangeContract::generic;
  throw std::invalid_argument("unknown range contract: " + s);
}

inline json shape_to_json(const Shape& s) {
  if (s.kind == Shape::Kind::constant) return {{"kind", "constant"}, {"params", {s.b}}};
  return {{"kind", "affine"}, {"params", {s.a, s.b}}};
}

inline Shape shape_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::vector<double> params = j.at("params").get<std::vector<double>>();
  if (kind == "constant" && params.size() == 1) return Shape::constant(params[0]);
  if (kind == "affine" && params.size() == 2) return Shape::affine(params[0], params[1]);
  throw std::invalid_argument("malformed shape: " + j.dump());
}

// Piece closure convention: the first piece owns the domain edge (unless the
// domain is left-open), every later interval is left-open, and an interval
// owns its right endpoint unless a point piece sits there. Point pieces are
// written as {at, value}; an omitted "hi" means unbounded.
inline json control_to_json(const ControlFunction& f) {
  if (!f.pieces())
    throw std::invalid_argument("eval-backed control cannot be serialized: " + f.label());
  const std::vector<Piece>& pieces = *f.pieces();
  json out;
  out["label"] = f.label();
  out["contract"] = to_string(f.contract());
  if (f.domain_lo_open()) out["lo_open"] = true;
  json arr = json::array();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    if (p.is_point()) {
      if (p.shape.kind != Shape::Kind::constant)
        throw std::invalid_argument("point piece must carry a constant value");
      arr.push_back({{"at", p.lo}, {"value", p.shape.b}});
      continue;
    }
    const bool expected_lo = i == 0 && !f.domain_lo_open();
    const bool next_is_point = i + 1 < pieces.size() && pieces[i + 1].is_point() &&
                               pieces[i + 1].lo == p.hi;
    const bool expected_hi = !next_is_point;
    if (p.closed_lo != expected_lo || (std::isfinite(p.hi) && p.closed_hi != expected_hi) ||
        (!std::isfinite(p.hi) && !p.closed_hi))
      throw std::invalid_argument("control does not fit the closure convention: " + f.label());
    json pj;
    pj["lo"] = p.lo;
    if (std::isfinite(p.hi)) pj["hi"] = p.hi;
    pj["shape"] = shape_to_json(p.shape);
    arr.push_back(std::move(pj));
  }
  out["pieces"] = std::move(arr);
  return out;
}

inline ControlFunction control_from_json(const json& j) {
  const std::string label = j.at("label").get<std::string>();
  const RangeContract rc = range_contract_from_string(j.at("contract").get<std::string>());
  const bool lo_open = j.value("lo_open", false);
  std::vector<Piece> pieces;
  const json& arr = j.at("pieces");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& pj = arr[i];
    if (pj.contains("at")) {
      pieces.push_back(Piece::point(pj.at("at").get<double>(), pj.at("value").get<double>()));
      continue;
    }
    const double lo = pj.at("lo").get<double>();
    const double hi = pj.contains("hi") ? pj.at("hi").get<double>() : infinity();
    const bool closed_lo = i == 0 && !lo_open;
    const bool next_is_point = i + 1 < arr.size() && arr[i + 1].contains("at") &&
                               arr[i + 1].at("at").get<double>() == hi;
    const bool closed_hi = !std::isfinite(hi) || !next_is_point;
    pieces.push_back(Piece::interval(lo, hi, closed_lo, closed_hi, shape_from_json(pj.at("shape"))));
  }
  return ControlFunction::from_pieces(label, rc, std::move(pieces));
}

inline json point_to_json(const Point& p) {
  json arr = json::array();
  for (std::size_t i = 0; i < p.dim(); ++i) arr.push_back(p[i]);
  return arr;
}

inline Point point_from_json(const json& j) {
  std::vector<double> coords = j.get<std::vector<double>>();
  return Point(std::move(coords));
}

inline json set_to_json(const FiniteClosedSet& s) {
  json arr = json::array();
  for (const Point& p : s.points()) arr.push_back(point_to_json(p));
  return arr;
}

inline FiniteClosedSet set_from_json(const json& j) {
  std::vector<Point> pts;
  for (const json& pj : j) pts.push_back(point_from_json(pj));
  return FiniteClosedSet(std::move(pts));
}

inline json domain_to_json(const Domain& d) {
  if (d.kind() == Domain::Kind::box)
    return {{"kind", "box"}, {"lo", d.box_lo()}, {"hi", d.box_hi()}};
  return {{"kind", "list"}, {"points", set_to_json(d.listed())}};
}

inline Domain domain_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "box")
    return Domain::box(j.at("lo").get<std::vector<double>>(),
                       j.at("hi").get<std::vector<double>>());
  if (kind == "list") return Domain::list(set_from_json(j.at("points")));
  throw std::invalid_argument("unknown domain kind: " + kind);
}

// Branch closure convention: interval branches are [lo, hi), the final one
// [lo, hi]; point branches {at, images} shadow whatever covers them.
inline json map_to_json(const MultivaluedMap& F) {
  json out;
  out["name"] = F.name();
  if (F.table()) {
    json rows = json::array();
    for (const auto& [x, img] : F.table()->entries)
      rows.push_back({{"x", point_to_json(x)}, {"image", set_to_json(img)}});
    out["table"] = std::move(rows);
    return out;
  }
  if (!F.piecewise())
    throw std::invalid_argument("eval-backed map cannot be serialized: " + F.name());
  out["domain"] = domain_to_json(F.domain());

  std::vector<const Branch*> intervals;
  std::vector<const Branch*> points;
  for (const Branch& b : F.piecewise()->branches)
    (b.is_point() ? points : intervals).push_back(&b);
  std::sort(intervals.begin(), intervals.end(),
            [](const Branch* a, const Branch* b) { return a->lo < b->lo; });
  std::sort(points.begin(), points.end(),
            [](const Branch* a, const Branch* b) { return a->lo < b->lo; });

  json arr = json::array();
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const Branch& b = *intervals[i];
    const bool last = i + 1 == intervals.size();
    if (!b.closed_lo || b.closed_hi != last)
      throw std::invalid_argument("map does not fit the closure convention: " + F.name());
    json bj;
    bj["lo"] = b.lo;
    bj["hi"] = b.hi;
    json imgs = json::array();
    for (const ImageExpr& e : b.images) imgs.push_back({{"a", e.a}, {"b", e.b}});
    bj["images"] = std::move(imgs);
    arr.push_back(std::move(bj));
  }
  for (const Branch* p : points) {
    json bj;
    bj["at"] = p->lo;
    json imgs = json::array();
    for (const ImageExpr& e : p->images) imgs.push_back({{"a", e.a}, {"b", e.b}});
    bj["images"] = std::move(imgs);
    arr.push_back(std::move(bj));
  }
  out["branches"] = std::move(arr);
  return out;
}

inline MultivaluedMap map_from_json(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  if (j.contains("table")) {
    TableDesc desc;
    for (const json& row : j.at("table"))
      desc.entries.emplace_back(point_from_json(row.at("x")), set_from_json(row.at("image")));
    return MultivaluedMap::from_table(name, std::move(desc));
  }
  const Domain domain = domain_from_json(j.at("domain"));
  std::vector<Branch> intervals;
  std::vector<Branch> points;
  for (const json& bj : j.at("branches")) {
    std::vector<ImageExpr> images;
    for (const json& ij : bj.at("images"))
      images.push_back(ImageExpr::affine(ij.at("a").get<double>(), ij.at("b").get<double>()));
    if (bj.contains("at")) {
      points.push_back(Branch::point(bj.at("at").get<double>(), std::move(images)));
      continue;
    }
    intervals.push_back(Branch::interval(bj.at("lo").get<double>(), bj.at("hi").get<double>(),
                                         true, false, std::move(images)));
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Branch& a, const Branch& b) { return a.lo < b.lo; });
  if (!intervals.empty()) intervals.back().closed_hi = true;
  Piecewise1DDesc desc;
  desc.branches = std::move(intervals);
  for (Branch& p : points) desc.branches.push_back(std::move(p));
  return MultivaluedMap::from_piecewise(name, domain, std::move(desc));
}

inline json witness_to_json(const Witness& w) {
  return {{"input", w.input}, {"value", w.value}};
}

inline json property_report_to_json(const PropertyReport& r) {
  json out;
  out["property"] = to_string(r.property);
  out["verdict"] = to_string(r.verdict);
  out["parameters"] = r.parameters;
  json ws = json::array();
  for (const Witness& w : r.witnesses) ws.push_back(witness_to_json(w));
  out["witnesses"] = std::move(ws);
  return out;
}

inline json map_check_report_to_json(const MapCheckReport& r) {
  json out;
  out["kind"] = to_string(r.kind);
  out["verdict"] = to_string(r.verdict);
  out["parameters"] = r.parameters;
  json ws = json::array();
  for (const MapWitness& w : r.witnesses) {
    json wj;
    wj["x"] = point_to_json(w.x);
    if (w.y) wj["y"] = point_to_json(*w.y);
    wj["value"] = w.value;
    wj["detail"] = w.detail;
    ws.push_back(std::move(wj));
  }
  out["witnesses"] = std::move(ws);
  return out;
}

inline json precondition_report_to_json(const PreconditionReport& r) {
  json out;
  out["mode"] = to_string(r.mode);
  out["satisfied"] = r.satisfied;
  out["notes"] = r.notes;
  out["C_sup_alpha"] = r.C_sup_alpha;
  json checks = json::array();
  for (const PropertyReport& c : r.checks) checks.push_back(property_report_to_json(c));
  out["checks"] = std::move(checks);
  return out;
}

inline json claim_report_to_json(const ClaimReport& r) {
  json out;
  out["claim"] = r.claim;
  out["holds"] = r.holds;
  out["conclusion"] = r.conclusion;
  json checks = json::array();
  for (const ClaimCheck& c : r.checks)
    checks.push_back({{"inequality", c.inequality},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"strict", c.strict},
                      {"margin", c.margin},
                      {"holds", c.holds}});
  out["checks"] = std::move(checks);
  return out;
}

inline std::string claim_report_text(const ClaimReport& r) {
  std::ostringstream os;
  os << "claim: " << r.claim << "\n";
  for (const ClaimCheck& c : r.checks)
    os << "  [" << (c.holds ? "ok" : "FAIL") << "] " << c.inequality << "  (lhs=" << c.lhs
       << ", rhs=" << c.rhs << ", margin=" << c.margin << ")\n";
  os << (r.holds ? "holds" : "violated") << ": " << r.conclusion << "\n";
  return os.str();
}

inline json summability_report_to_json(const SummabilityReport& r) {
  json out;
  out["verdict"] = to_string(r.verdict);
  out["method"] = r.method;
  out["tail_ratio"] = r.tail_ratio;
  out["exponent"] = r.exponent;
  out["parameters"] = r.parameters;
  return out;
}

inline json selection_record_to_json(std::size_t n, const SelectionRecord& rec) {
  json out;
  out["n"] = n;
  out["x"] = point_to_json(rec.x);
  out["y"] = point_to_json(rec.y);
  out["d_n"] = rec.d_xy;
  out["dF_x"] = rec.dF_x;
  out["dF_y"] = rec.dF_y;
  out["marginA"] = rec.marginA;
  out["marginB"] = rec.marginB;
  return out;
}

inline json trace_summary_to_json(const IterationTrace& trace) {
  json s;
  s["start"] = point_to_json(trace.start);
  s["last"] = point_to_json(trace.last);
  s["reason"] = to_string(trace.reason);
  s["steps"] = trace.steps.size();
  s["delta_est"] = trace.delta_est;
  s["nabla_est"] = trace.nabla_est;
  if (trace.failure_near_miss) {
    s["near_miss"] = selection_record_to_json(trace.steps.size(), *trace.failure_near_miss);
    s["near_miss"].erase("n");
  }
  return {{"summary", std::move(s)}};
}

// One JSON object per line: every step in order, then the summary object.
inline void write_trace_jsonl(std::ostream& os, const IterationTrace& trace) {
  for (std::size_t n = 0; n < trace.steps.size(); ++n)
    os << selection_record_to_json(n, trace.steps[n]).dump() << '\n';
  os << trace_summary_to_json(trace).dump() << '\n';
}

// Stable outer wrapper for every emitted report; carries no timestamps so
// identical inputs produce identical bytes.
inline json report_envelope(const std::string& kind, json payload) {
  json out;
  out["schema"] = "v1";
  out["kind"] = kind;
  out["payload"] = std::move(payload);
  return out;
}

}  // namespace contractum
