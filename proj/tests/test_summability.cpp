#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "contractum/summability.hpp"

using namespace contractum;

namespace {

// Independent oracle: run the recursion with a plain lambda, no library code.
std::vector<double> recursion_oracle(double C, double p, double t0, std::size_t N) {
  std::vector<double> vals{t0};
  double t = t0;
  for (std::size_t n = 1; n <= N; ++n) {
    t = (1.0 - C * std::pow(t, p)) * t;
    if (t < 1e-12) break;
    vals.push_back(t);
  }
  return vals;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("power majorant recursion matches the oracle with frozen values", "[summability]") {
  const ControlFunction phi = phi_power(1.0, 0.5);
  REQUIRE(phi.validity_hi.has_value());
  CHECK(*phi.validity_hi == 1.0);

  const PhiSequence seq = phi_sequence(phi, 0.25, 200);
  REQUIRE(seq.values.size() == 201);
  CHECK_FALSE(seq.truncated_at.has_value());
  // (1 - sqrt(1/4)) * 1/4 = 1/8, exact in binary.
  CHECK(seq.values[1] == 0.125);

  const std::vector<double> oracle = recursion_oracle(1.0, 0.5, 0.25, 200);
  REQUIRE(oracle.size() == seq.values.size());
  for (std::size_t n = 0; n < oracle.size(); ++n)
    CHECK(seq.values[n] == Catch::Approx(oracle[n]).margin(1e-15));

  const PhiSequence half = phi_sequence(phi_power(0.5, 0.5), 0.5, 10);
  CHECK(half.values[1] == Catch::Approx(0.32322330470336313).margin(1e-15));
}

TEST_CASE("closed-form bound values", "[summability]") {
  // n=0 reproduces the seed: (t0^-p)^(-1/p) = t0.
  CHECK(phi_bound(1.0, 0.5, 0.25, 0) == Catch::Approx(0.25).margin(1e-15));
  // (0.5*1 + 2)^-2 = 2.5^-2 = 0.16.
  CHECK(phi_bound(1.0, 0.5, 0.25, 1) == Catch::Approx(0.16).margin(1e-15));
}

TEST_CASE("parameter and domain errors", "[summability]") {
  CHECK_THROWS_AS(phi_power(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(phi_power(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(phi_power(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(phi_power(1.0, 1.0), std::invalid_argument);

  const ControlFunction phi = phi_power(1.0, 0.5);
  CHECK_THROWS_WITH(phi_sequence(phi, 1.0, 10),
                    Catch::Matchers::ContainsSubstring("validity"));
  CHECK_THROWS_WITH(phi_sequence(phi, 0.0, 10),
                    Catch::Matchers::ContainsSubstring("t0 > 0"));
  // Validity edge (1/C)^(1/p) = 4 admits seeds up to but not including 4.
  CHECK_NOTHROW(phi_sequence(phi_power(0.5, 0.5), 1.5, 10));
  CHECK_THROWS_AS(phi_sequence(phi_power(0.5, 0.5), 4.0, 10), std::invalid_argument);

  const ControlFunction steep = ControlFunction::from_eval(
      "1-2t", RangeContract::generic, [](double t) { return 1.0 - 2.0 * t; });
  CHECK_THROWS_WITH(phi_sequence(steep, 0.6, 10),
                    Catch::Matchers::ContainsSubstring("majorant leaves (0,1)"));
  const ControlFunction above = ControlFunction::from_eval(
      "1+t", RangeContract::generic, [](double t) { return 1.0 + t; });
  CHECK_THROWS_WITH(phi_sequence(above, 0.1, 10),
                    Catch::Matchers::ContainsSubstring("majorant leaves (0,1)"));
}

TEST_CASE("geometric decay truncates once iterates drop below tolerance", "[summability]") {
  const ControlFunction half = ControlFunction::constant("phi-half", RangeContract::generic, 0.5);
  const PhiSequence seq = phi_sequence(half, 1.0, 2000);
  // 2^-39 is the last value at or above 1e-12; 2^-40 falls below.
  REQUIRE(seq.truncated_at.has_value());
  CHECK(*seq.truncated_at == 40);
  REQUIRE(seq.values.size() == 40);
  CHECK(seq.values[39] == std::ldexp(1.0, -39));
}

TEST_CASE("bound invariants hold for the power majorant and flag tampering", "[summability]") {
  const PhiSequence seq = phi_sequence(phi_power(1.0, 0.5), 0.25, 200);
  const std::vector<PropertyReport> reports = bound_check(seq, 1.0, 0.5, 0.25);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].holds());
  CHECK(reports[1].holds());
  CHECK(reports[0].witnesses.empty());
  CHECK(reports[1].witnesses.empty());

  PhiSequence tampered = seq;
  tampered.values[5] *= 10.0;
  const std::vector<PropertyReport> bad = bound_check(tampered, 1.0, 0.5, 0.25);
  CHECK_FALSE(bad[0].holds());
  REQUIRE_FALSE(bad[0].witnesses.empty());
  CHECK(bad[0].witnesses.front().input == 5.0);
  // The inflated term makes the k=4 increment collapse below p*C.
  CHECK_FALSE(bad[1].holds());
  REQUIRE_FALSE(bad[1].witnesses.empty());
  CHECK(bad[1].witnesses.front().input == 4.0);

  CHECK_THROWS_WITH(bound_check(seq, 1.0, 0.5, 0.5),
                    Catch::Matchers::ContainsSubstring("does not start at t0"));
}

TEST_CASE("summability verdicts across decay regimes", "[summability]") {
  // Geometric decay: settled by the tail ratio alone.
  const ControlFunction half = ControlFunction::constant("phi-half", RangeContract::generic, 0.5);
  const SummabilityReport geo = summability_verdict(phi_sequence(half, 1.0, 2000));
  CHECK(geo.verdict == SummabilityVerdict::summable);
  CHECK(geo.method == "tail_ratio");
  CHECK(geo.tail_ratio == Catch::Approx(0.5).margin(1e-12));

  // Power decay ~ n^-2: tail ratio approaches 1, the log-log fit decides.
  const SummabilityReport pow2 = summability_verdict(phi_sequence(phi_power(0.5, 0.5), 0.5, 2000));
  CHECK(pow2.verdict == SummabilityVerdict::summable);
  CHECK(pow2.method == "bound_fit");
  CHECK(pow2.tail_ratio > geometric_ratio_cap);
  CHECK(pow2.exponent == Catch::Approx(2.0).margin(0.05));

  // phi(t) = 1 - t gives the harmonic-like tail ~ 1/n: divergent.
  const ControlFunction lin = ControlFunction::from_eval(
      "1-t", RangeContract::generic, [](double t) { return 1.0 - t; });
  const SummabilityReport harm = summability_verdict(phi_sequence(lin, 0.5, 2000));
  CHECK(harm.verdict == SummabilityVerdict::diverging);
  CHECK(harm.method == "bound_fit");
  CHECK(harm.exponent > 0.97);
  CHECK(harm.exponent <= 1.0);

  // Too short and not truncated: refuse to guess.
  const ControlFunction slow = ControlFunction::constant("phi-0.9", RangeContract::generic, 0.9);
  CHECK_THROWS_WITH(summability_verdict(phi_sequence(slow, 1.0, 50)),
                    Catch::Matchers::ContainsSubstring("at least 100 terms"));

  CHECK(to_string(SummabilityVerdict::summable) == "summable");
  CHECK(to_string(SummabilityVerdict::diverging) == "diverging");
  CHECK(to_string(SummabilityVerdict::inconclusive) == "inconclusive");
}

TEST_CASE("csv export is parseable and deterministic", "[summability]") {
  const PhiSequence seq = phi_sequence(phi_power(1.0, 0.5), 0.25, 5);
  std::ostringstream out;
  write_phi_csv(out, seq, 1.0, 0.5, 0.25);
  const std::vector<std::string> lines = split_lines(out.str());
  REQUIRE(lines.size() == seq.values.size() + 1);
  CHECK(lines[0] == "n,phi_n,bound_n,partial_sum");
  // Row 0: seed equals its own bound and its own partial sum.
  CHECK(lines[1] == "0,0.25,0.25,0.25");

  double sum = 0.0;
  for (std::size_t n = 0; n < seq.values.size(); ++n) {
    std::istringstream row(lines[n + 1]);
    std::string cell;
    std::getline(row, cell, ',');
    CHECK(std::stoul(cell) == n);
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) == seq.values[n]);
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) == Catch::Approx(phi_bound(1.0, 0.5, 0.25, n)).margin(1e-15));
    std::getline(row, cell, ',');
    sum += seq.values[n];
    CHECK(std::stod(cell) == Catch::Approx(sum).margin(1e-15));
  }

  std::ostringstream again;
  write_phi_csv(again, seq, 1.0, 0.5, 0.25);
  CHECK(out.str() == again.str());
}
