// Command-line front end: map checks, selection iteration, theorem
// precondition validation, summability experiments, and the built-in claim
// verifications. Exit codes: 0 when the run holds/converges, 1 when a check
// is violated or the run fails, 2 on configuration errors.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "contractum/io.hpp"

using namespace contractum;

namespace {

struct ExperimentConfig {
  std::string command;
  std::string map_source;
  std::string controls_source;
  std::string kind = "ab-mapping";
  std::string mode = "t14";
  double x0 = 1.0;
  double eps = 1e-9;
  std::size_t max_steps = 10000;
  double C = 1.0;
  double p = 0.5;
  double t0 = 0.5;
  double radius = 1.0;
  double k = 0.75;
  std::size_t N = 2000;
  double step = 1e-3;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read file: " + path);
  json j;
  in >> j;
  return j;
}

void emit(const json& report, const std::string& out) {
  const std::string text = report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::invalid_argument("cannot write file: " + out);
  f << text;
}

bool has_corpus_prefix(const std::string& src) { return src.rfind("corpus:", 0) == 0; }

MultivaluedMap load_map(const std::string& src, std::optional<CorpusEntry>& entry) {
  if (src.empty()) throw std::invalid_argument("a map source is required (--map)");
  if (has_corpus_prefix(src)) {
    entry = corpus_entry(src.substr(7));
    return entry->map;
  }
  return map_from_json(read_json_file(src));
}

struct Controls {
  ControlFunction alpha;
  ControlFunction beta;
  std::optional<ControlFunction> gamma;
};

Controls entry_controls(const CorpusEntry& e) {
  if (!e.alpha || !e.beta)
    throw std::invalid_argument("corpus entry " + e.label + " carries no controls");
  return {*e.alpha, *e.beta, e.gamma};
}

Controls load_controls(const std::string& src, const std::optional<CorpusEntry>& map_entry) {
  if (src.empty()) {
    if (map_entry) return entry_controls(*map_entry);
    throw std::invalid_argument("a controls source is required (--controls)");
  }
  if (has_corpus_prefix(src)) return entry_controls(corpus_entry(src.substr(7)));
  const json j = read_json_file(src);
  Controls c{control_from_json(j.at("alpha")), control_from_json(j.at("beta")), std::nullopt};
  if (j.contains("gamma")) c.gamma = control_from_json(j.at("gamma"));
  return c;
}

std::vector<Point> sample_domain(const Domain& dom, double step, std::size_t samples,
                                 std::uint64_t seed) {
  std::vector<Point> xs;
  if (dom.kind() == Domain::Kind::list) {
    for (const Point& p : dom.listed().points()) xs.push_back(p);
  } else if (dom.dim() == 1) {
    for (double t : Grid1D{dom.box_lo()[0], dom.box_hi()[0], step, {}}.points())
      xs.push_back(Point::scalar(t));
  } else {
    // Higher dimensions: corners plus the center, then random fill below.
    const std::size_t d = dom.dim();
    if (d <= 10) {
      for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        std::vector<double> c(d);
        for (std::size_t i = 0; i < d; ++i)
          c[i] = (mask >> i) & 1 ? dom.box_hi()[i] : dom.box_lo()[i];
        xs.push_back(Point(std::move(c)));
      }
    }
    std::vector<double> mid(d);
    for (std::size_t i = 0; i < d; ++i) mid[i] = 0.5 * (dom.box_lo()[i] + dom.box_hi()[i]);
    xs.push_back(Point(std::move(mid)));
  }
  if (samples > 0 && dom.kind() == Domain::Kind::box) {
    std::mt19937_64 rng(seed);
    for (std::size_t n = 0; n < samples; ++n) {
      std::vector<double> c(dom.dim());
      for (std::size_t i = 0; i < dom.dim(); ++i) {
        std::uniform_real_distribution<double> uni(dom.box_lo()[i], dom.box_hi()[i]);
        c[i] = uni(rng);
      }
      xs.push_back(Point(std::move(c)));
    }
  }
  return xs;
}

int run_check_map(const ExperimentConfig& cfg) {
  std::optional<CorpusEntry> entry;
  const MultivaluedMap F = load_map(cfg.map_source, entry);
  const Metric m = Metric::euclidean();
  const std::vector<Point> xs = sample_domain(F.domain(), cfg.step, cfg.samples, cfg.seed);

  MapCheckReport rep;
  if (cfg.kind == "ab-mapping") {
    const Controls c = load_controls(cfg.controls_source, entry);
    rep = check_ab_mapping(F, c.alpha, c.beta, xs, m);
  } else if (cfg.kind == "ab-contraction") {
    const Controls c = load_controls(cfg.controls_source, entry);
    rep = check_ab_contraction(F, c.alpha, c.beta, xs, m);
  } else if (cfg.kind == "hausdorff-contraction") {
    const ControlFunction k = ControlFunction::constant("k", RangeContract::beta, cfg.k);
    rep = check_hausdorff_contraction(F, k, xs, m);
  } else {
    throw std::invalid_argument("unknown check kind: " + cfg.kind);
  }
  emit(report_envelope("map-check", map_check_report_to_json(rep)), cfg.out);
  return rep.holds() ? 0 : 1;
}

int run_iterate(const ExperimentConfig& cfg) {
  std::optional<CorpusEntry> entry;
  const MultivaluedMap F = load_map(cfg.map_source, entry);
  const Controls c = load_controls(cfg.controls_source, entry);
  const IterationTrace tr = iterate(F, Point::scalar(cfg.x0), c.alpha, c.beta,
                                    Metric::euclidean(), StopPolicy{cfg.eps, cfg.max_steps});
  if (cfg.out.empty()) {
    write_trace_jsonl(std::cout, tr);
  } else {
    std::ofstream f(cfg.out);
    if (!f) throw std::invalid_argument("cannot write file: " + cfg.out);
    write_trace_jsonl(f, tr);
  }
  return tr.reason == StopReason::converged ? 0 : 1;
}

int run_verify_theorem(const ExperimentConfig& cfg) {
  std::optional<CorpusEntry> no_entry;
  const Controls c = load_controls(cfg.controls_source, no_entry);
  TheoremSpec spec = [&] {
    if (cfg.mode == "t14") {
      if (!c.gamma) throw std::invalid_argument("t14 needs a gamma control");
      return TheoremSpec::t14(c.alpha, c.beta, *c.gamma);
    }
    if (cfg.mode == "t15") return TheoremSpec::t15(c.alpha, c.beta);
    if (cfg.mode == "t16") return TheoremSpec::t16(c.alpha, c.beta, cfg.C, cfg.p, cfg.radius);
    throw std::invalid_argument("unknown theorem mode: " + cfg.mode);
  }();
  const PreconditionReport rep = validate_preconditions(spec);
  emit(report_envelope("preconditions", precondition_report_to_json(rep)), cfg.out);
  return rep.satisfied ? 0 : 1;
}

int run_summability(const ExperimentConfig& cfg) {
  const ControlFunction phi = phi_power(cfg.C, cfg.p);
  const PhiSequence seq = phi_sequence(phi, cfg.t0, cfg.N);
  const std::vector<PropertyReport> bounds = bound_check(seq, cfg.C, cfg.p, cfg.t0);
  const SummabilityReport verdict = summability_verdict(seq);

  if (cfg.csv.empty()) {
    write_phi_csv(std::cout, seq, cfg.C, cfg.p, cfg.t0);
  } else {
    std::ofstream f(cfg.csv);
    if (!f) throw std::invalid_argument("cannot write file: " + cfg.csv);
    write_phi_csv(f, seq, cfg.C, cfg.p, cfg.t0);
  }

  json payload;
  payload["parameters"] = {{"C", cfg.C}, {"p", cfg.p}, {"t0", cfg.t0}, {"N", cfg.N}};
  payload["terms"] = seq.values.size();
  payload["truncated_at"] = seq.truncated_at ? json(*seq.truncated_at) : json(nullptr);
  payload["bound_envelope"] = property_report_to_json(bounds[0]);
  payload["bound_increments"] = property_report_to_json(bounds[1]);
  payload["summability"] = summability_report_to_json(verdict);
  if (!cfg.out.empty()) emit(report_envelope("summability", std::move(payload)), cfg.out);

  return bounds[0].holds() && bounds[1].holds() ? 0 : 1;
}

int run_example_ciric(const ExperimentConfig& cfg) {
  const ClaimReport r1 = verify_claim_1();
  const ClaimReport r2 = verify_claim_2();
  const ClaimReport r3 = verify_claim_3();
  int i = 0;
  for (const ClaimReport* r : {&r1, &r2, &r3})
    std::cout << "claim " << ++i << " (" << r->claim << "): " << (r->holds ? "holds" : "violated")
              << "\n";
  if (!cfg.out.empty()) {
    json arr = json::array();
    for (const ClaimReport* r : {&r1, &r2, &r3}) arr.push_back(claim_report_to_json(*r));
    emit(report_envelope("claims", std::move(arr)), cfg.out);
  }
  return r1.holds && r2.holds && r3.holds ? 0 : 1;
}

int run(const ExperimentConfig& cfg) try {
  if (cfg.command == "check-map") return run_check_map(cfg);
  if (cfg.command == "iterate") return run_iterate(cfg);
  if (cfg.command == "verify-theorem") return run_verify_theorem(cfg);
  if (cfg.command == "summability") return run_summability(cfg);
  if (cfg.command == "example-ciric") return run_example_ciric(cfg);
  std::cerr << "config error: unknown command '" << cfg.command << "'\n";
  return 2;
} catch (const std::exception& e) {
  std::cerr << "config error: " << e.what() << "\n";
  return 2;
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  const json j = read_json_file(path);
  cfg.command = j.value("command", cfg.command);
  cfg.map_source = j.value("map", cfg.map_source);
  cfg.controls_source = j.value("controls", cfg.controls_source);
  cfg.kind = j.value("kind", cfg.kind);
  cfg.mode = j.value("mode", cfg.mode);
  cfg.x0 = j.value("x0", cfg.x0);
  cfg.eps = j.value("eps", cfg.eps);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.C = j.value("C", cfg.C);
  cfg.p = j.value("p", cfg.p);
  cfg.t0 = j.value("t0", cfg.t0);
  cfg.radius = j.value("radius", cfg.radius);
  cfg.k = j.value("k", cfg.k);
  cfg.N = j.value("N", cfg.N);
  cfg.step = j.value("step", cfg.step);
  cfg.samples = j.value("samples", cfg.samples);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out = j.value("out", cfg.out);
  cfg.csv = j.value("csv", cfg.csv);
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;
  std::string config_path;

  CLI::App app{"checks, iterations, and experiments for (alpha,beta)-mappings"};
  app.add_option("--config", config_path, "JSON experiment config; overrides subcommand flags");
  app.require_subcommand(0, 1);

  auto add_map_opts = [&](CLI::App* sub) {
    sub->add_option("--map", cfg.map_source, "corpus:<label> or a map JSON file");
    sub->add_option("--controls", cfg.controls_source,
                    "corpus:<label> or a controls JSON file (defaults to the map's corpus entry)");
  };

  CLI::App* sub_check = app.add_subcommand("check-map", "sample a map against a check kind");
  add_map_opts(sub_check);
  sub_check->add_option("--kind", cfg.kind, "ab-mapping | ab-contraction | hausdorff-contraction");
  sub_check->add_option("--k", cfg.k, "constant k for hausdorff-contraction");
  sub_check->add_option("--step", cfg.step, "sampling grid step");
  sub_check->add_option("--samples", cfg.samples, "extra random sample points");
  sub_check->add_option("--seed", cfg.seed, "seed for random sampling");
  sub_check->add_option("--out", cfg.out, "report path (stdout when omitted)");

  CLI::App* sub_iter = app.add_subcommand("iterate", "run the selection dynamics from a start");
  add_map_opts(sub_iter);
  sub_iter->add_option("--x0", cfg.x0, "starting point");
  sub_iter->add_option("--eps", cfg.eps, "fixed-point threshold on d_F");
  sub_iter->add_option("--max-steps", cfg.max_steps, "step budget");
  sub_iter->add_option("--out", cfg.out, "trace path, JSON lines (stdout when omitted)");

  CLI::App* sub_thm = app.add_subcommand("verify-theorem", "validate theorem preconditions");
  sub_thm->add_option("--mode", cfg.mode, "t14 | t15 | t16");
  sub_thm->add_option("--controls", cfg.controls_source, "corpus:<label> or a controls JSON file");
  sub_thm->add_option("--C", cfg.C, "decay constant (t16)");
  sub_thm->add_option("--p", cfg.p, "decay exponent (t16)");
  sub_thm->add_option("--radius", cfg.radius, "neighborhood radius (t16)");
  sub_thm->add_option("--out", cfg.out, "report path (stdout when omitted)");

  CLI::App* sub_sum = app.add_subcommand("summability", "run the decay recursion and its bounds");
  sub_sum->add_option("--C", cfg.C, "majorant constant");
  sub_sum->add_option("--p", cfg.p, "majorant exponent in (0,1)");
  sub_sum->add_option("--t0", cfg.t0, "seed value");
  sub_sum->add_option("--N", cfg.N, "step budget");
  sub_sum->add_option("--csv", cfg.csv, "CSV path (stdout when omitted)");
  sub_sum->add_option("--out", cfg.out, "JSON report path");

  app.add_subcommand("example-ciric", "verify the three built-in example claims");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty())
      apply_config_file(cfg, config_path);
    else if (!app.get_subcommands().empty())
      cfg.command = app.get_subcommands().front()->get_name();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (cfg.command.empty()) {
    std::cerr << app.help();
    return 2;
  }
  return run(cfg);
}
