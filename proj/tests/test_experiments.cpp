// Copyright 2026 The metagate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <charconv>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "metagate/experiments.hpp"
#include "test_support.hpp"

using namespace metagate;
using metagate::testing::kTwoPi;

namespace {

ExperimentSetup fast_setup(std::size_t truncation = 4) {
  ExperimentSetup s{testing::reference_layout(0.0, truncation), {}, {}, {}};
  s.evolution.dt_initial = 2e-9;
  s.gate.dissipation = false;
  s.gate.snap_closed_loop = true;
  return s;
}

SweepRow row(double d, double f) {
  SweepRow r;
  r.separation = d;
  r.j_eff = 1.5e6 * d;
  r.j_ij = 0.1 + d;
  r.gate_time = 2.5e-7;
  r.fidelity_iswap = f;
  r.fidelity_cz = f;
  r.leakage = 1e-3;
  return r;
}

}  // namespace

TEST_CASE("property: format_double round-trips exactly") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 2000) {
    const std::uint64_t b = bits(rng);
    double x;
    std::memcpy(&x, &b, sizeof x);
    if (!std::isfinite(x)) continue;
    const std::string s = format_double(x);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    REQUIRE(back == x);
    ++checked;
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(0.25) == "0.25");
}

TEST_CASE("sweep CSV round trip with NaN rows and quoted errors") {
  SweepTable t;
  t.rows = {row(0.0, 0.999), row(0.01, 0.998)};
  SweepRow bad;
  bad.separation = 0.02;
  bad.j_eff = bad.j_ij = bad.gate_time = std::numeric_limits<double>::quiet_NaN();
  bad.fidelity_iswap = bad.fidelity_cz = bad.leakage = std::numeric_limits<double>::quiet_NaN();
  bad.error = "gate failed: \"x\", then\nstopped";
  t.rows.push_back(bad);
  std::stringstream ss;
  t.write_csv(ss);
  const std::string text = ss.str();
  CHECK(text.rfind(std::string(kSweepHeader) + "\n", 0) == 0);
  const SweepTable back = SweepTable::parse_csv(ss);
  CHECK(back == t);
  CHECK(back.rows[2].error == bad.error);
  CHECK_NOTHROW(back.validate());
}

TEST_CASE("sweep table validation and parse errors") {
  SweepTable t;
  t.rows = {row(0.01, 0.9), row(0.01, 0.9)};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t.rows = {row(0.0, 1.2)};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);

  auto parse = [](const std::string& s) {
    std::istringstream is(s);
    return SweepTable::parse_csv(is);
  };
  const std::string h = std::string(kSweepHeader) + "\n";
  CHECK_THROWS_AS(parse(""), std::invalid_argument);
  CHECK_THROWS_AS(parse("d,j\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse(h + "0,1,2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse(h + "0,1,2,3,abc,0.5,0,\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse(h + "0,1,2,3,0.5,0.5,0,\"open\n"), std::invalid_argument);
  CHECK(parse(h).rows.empty());
}

TEST_CASE("place_pair centres the pair on z") {
  const SystemLayout l = place_pair(testing::reference_layout(), {}, 0.03);
  CHECK(l.qubits()[0].position.z() == doctest::Approx(-0.015));
  CHECK(l.qubits()[1].position.z() == doctest::Approx(0.015));
  CHECK(l.qubits()[0].position.x() == 0.0);
}

TEST_CASE("distance sweep: coupling halves at 5 cm and threads do not change results") {
  const ExperimentSetup s = fast_setup();
  const SweepTable one = distance_sweep(s, 0.0, 0.05, 3, 1);
  const SweepTable two = distance_sweep(s, 0.0, 0.05, 3, 2);
  CHECK(one == two);
  REQUIRE(one.rows.size() == 3);
  CHECK(one.rows.back().separation == 0.05);
  CHECK(one.rows[1].separation == doctest::Approx(0.025));
  CHECK(one.rows[2].j_eff / one.rows[0].j_eff == doctest::Approx(0.5).epsilon(1e-12));
  for (const auto& r : one.rows) {
    CHECK(r.error.empty());
    CHECK(r.j_ij == doctest::Approx(r.j_eff / 2));
    CHECK(r.gate_time == doctest::Approx(std::numbers::pi / (2 * r.j_eff)));
    CHECK(r.fidelity_iswap >= 0.98);
    CHECK(r.fidelity_cz >= 0.98);
  }
  CHECK_NOTHROW(one.validate());
  CHECK_THROWS_AS(distance_sweep(s, 0.05, 0.05, 3), std::invalid_argument);
  CHECK_THROWS_AS(distance_sweep(s, -0.01, 0.05, 3), std::invalid_argument);
  CHECK_THROWS_AS(distance_sweep(s, 0.0, 0.05, 1), std::invalid_argument);
}

TEST_CASE("distance sweep records failed rows instead of aborting") {
  ExperimentSetup s = fast_setup(3);
  auto qs = s.layout.qubits();
  qs[0].drive_detuning = 0.0;  // CZ dressing undefined
  s.layout = s.layout.with_qubits(qs);
  const SweepTable t = distance_sweep(s, 0.0, 0.01, 2, 1);
  for (const auto& r : t.rows) {
    CHECK_FALSE(r.error.empty());
    CHECK(std::isnan(r.fidelity_cz));
  }
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("exchange experiment writes the documented CSV") {
  const ExperimentSetup s = fast_setup(3);
  const auto path = std::filesystem::temp_directory_path() / "metagate_exchange_test.csv";
  const auto traj = exchange_experiment(s, 5e-7, 6, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == kExchangeHeader);
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 6);
  CHECK(traj.observables.at("p01_eff").front() == doctest::Approx(1.0));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(exchange_experiment(s, 5e-7, 6, "/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST_CASE("numeric conditional phase agrees with the closed form") {
  const double eps = kTwoPi * 200e6, lam = 0.1 * eps;
  for (double tau : {3e-9, 1.1e-8, 2.5e-8}) {
    const double numeric = numeric_conditional_phase(lam, 0.7 * lam, eps, tau, 20, {});
    const double closed = conditional_phase_closed_form(lam, 0.7 * lam, eps, tau);
    CHECK(std::abs(std::remainder(numeric - closed, kTwoPi)) < 1e-6);
  }
}

TEST_CASE("validation report format") {
  ValidationReport r;
  r.checks.push_back({"alpha", true, 1e-13, "<= 1e-12", ""});
  r.checks.push_back({"beta", false, 0.5, ">= 0.98", "why"});
  CHECK_FALSE(r.passed());
  std::ostringstream os;
  r.write(os);
  const std::string s = os.str();
  CHECK(s.find("alpha") != std::string::npos);
  CHECK(s.find("PASS") != std::string::npos);
  CHECK(s.find("FAIL") != std::string::npos);
  CHECK(s.find("# why") != std::string::npos);
  CHECK(s.find("overall") != std::string::npos);
  r.checks.pop_back();
  CHECK(r.passed());
}

TEST_CASE("validate passes at the reference point and flags a coarse truncation") {
  ExperimentSetup s = fast_setup(6);
  s.gate.dissipation = true;
  const ValidationReport ok = validate(s);
  for (const auto& c : ok.checks) CHECK_MESSAGE(c.pass, c.name);
  CHECK(ok.passed());
  CHECK(ok.checks.size() >= 12);

  const ValidationReport coarse = validate(fast_setup(2));
  bool truncation_failed = false;
  for (const auto& c : coarse.checks) {
    if (c.name == "truncation_convergence") truncation_failed = !c.pass;
  }
  CHECK(truncation_failed);
  CHECK_FALSE(coarse.passed());
}
