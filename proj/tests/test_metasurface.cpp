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

#include <cmath>
#include <random>

#include "metagate/metasurface.hpp"
#include "test_support.hpp"

using namespace metagate;
using metagate::testing::kTwoPi;

TEST_CASE("exponential transmission: |T| halves over the calibrated length") {
  const MetasurfaceConfig ms = testing::reference_metasurface();
  const Vec3 k(1.0, 0.0, 0.0);
  const cplx t0 = transmission_at(ms.transmission, k, Vec3::Zero());
  CHECK(std::norm(t0) == doctest::Approx(0.5).epsilon(1e-15));
  const cplx t5 = transmission_at(ms.transmission, k, Vec3(0.0, 0.0, 0.05));
  CHECK(std::norm(t5) == doctest::Approx(0.125).epsilon(1e-14));
  // Decay depends on |r| only.
  const cplx tx = transmission_at(ms.transmission, k, Vec3(0.03, 0.0, 0.04));
  CHECK(std::abs(tx - t5) < 1e-15);
}

TEST_CASE("calibrate_length inverts the exponential model") {
  const double len = calibrate_length(0.5, 0.05);
  CHECK(len == doctest::Approx(0.05 / std::log(2.0)));
  const ExponentialTransmission t{cplx(1.0, 0.0), len};
  CHECK(std::abs(transmission_at(t, Vec3::UnitX(), Vec3(0, 0, 0.05))) == doctest::Approx(0.5));
  CHECK_THROWS_AS(calibrate_length(1.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_length(0.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_length(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("gaussian transmission ignores displacement along the wavevector") {
  const GaussianTransmission g{cplx(0.8, 0.0), 0.02};
  const Vec3 k(0.0, 0.0, 3.0);
  CHECK(std::abs(transmission_at(g, k, Vec3(0, 0, 0.5)) - cplx(0.8)) < 1e-15);
  const double expected = 0.8 * std::exp(-1.0);
  CHECK(std::abs(transmission_at(g, k, Vec3(0.02, 0, 0.5))) == doctest::Approx(expected));
  // Zero wavevector: the full displacement counts.
  CHECK(std::abs(transmission_at(g, Vec3::Zero(), Vec3(0, 0, 0.02))) == doctest::Approx(expected));
}

TEST_CASE("tabulated transmission interpolates linearly in k.r") {
  const TabulatedTransmission t{{{0.0, cplx(1.0, 0.0)}, {1.0, cplx(0.0, 0.5)}, {2.0, cplx(0.2, 0.0)}}};
  validate_transmission(t);
  const Vec3 k(2.0, 0.0, 0.0);
  const cplx mid = transmission_at(t, k, Vec3(0.25, 0, 0));  // x = 0.5
  CHECK(std::abs(mid - cplx(0.5, 0.25)) < 1e-15);
  CHECK(std::abs(transmission_at(t, k, Vec3(1.0, 0, 0)) - cplx(0.2, 0.0)) < 1e-15);
  CHECK(std::abs(transmission_at(t, k, Vec3::Zero()) - cplx(1.0, 0.0)) < 1e-15);
  CHECK_THROWS_AS(transmission_at(t, k, Vec3(1.1, 0, 0)), std::out_of_range);
  CHECK_THROWS_AS(transmission_at(t, k, Vec3(-0.1, 0, 0)), std::out_of_range);
}

TEST_CASE("transmission validation errors") {
  CHECK_THROWS_AS(validate_transmission(UniformTransmission{cplx(1.0, 0.1)}), std::invalid_argument);
  CHECK_THROWS_AS(validate_transmission(ExponentialTransmission{cplx(0.5), 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_transmission(GaussianTransmission{cplx(0.5), -1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_transmission(TabulatedTransmission{{{0.0, cplx(1.0)}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_transmission(TabulatedTransmission{{{1.0, cplx(1.0)}, {0.0, cplx(1.0)}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_transmission(TabulatedTransmission{{{0.0, cplx(2.0)}, {1.0, cplx(1.0)}}}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_transmission(UniformTransmission{cplx(0.0, 1.0)}));
}

TEST_CASE("envelope values and mean-square shape against quadrature") {
  ModulationEnvelope e;
  e.duration = 2e-7;
  e.amplitude = 0.7;
  CHECK(e.value_at(-1e-12) == 0.0);
  CHECK(e.value_at(1e-7) == 0.7);
  CHECK(e.value_at(2.0000001e-7) == 0.0);
  CHECK(e.mean_square_shape() == 1.0);

  e.shape = EnvelopeShape::RaisedCosine;
  CHECK(e.value_at(1e-7) == doctest::Approx(0.7));
  CHECK(e.value_at(0.0) == doctest::Approx(0.0));
  // Midpoint rule for <(v/A)^2>.
  const int n = 20000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = e.value_at((k + 0.5) * e.duration / n) / e.amplitude;
    acc += v * v;
  }
  CHECK(e.mean_square_shape() == doctest::Approx(acc / n).epsilon(1e-9));
}

TEST_CASE("static coupling carries transmission, propagation phase and isolation") {
  MetasurfaceConfig ms = testing::reference_metasurface();
  ms.modes[0].wavevector = Vec3(0.0, 0.0, 40.0);
  QubitSpec q = testing::reference_qubits()[0];
  q.position = Vec3(0.0, 0.0, 0.01);
  const cplx g = static_coupling(q, ms.modes[0], ms);
  const cplx t = transmission_at(ms.transmission, ms.modes[0].wavevector, q.position);
  const cplx expected = q.bare_coupling * t * std::polar(1.0, 0.4);
  CHECK(std::abs(g - expected) < 1e-9 * std::abs(expected));

  ms.modes[0].spectator = true;
  ms.isolation_db = 23.0;
  const cplx gs = static_coupling(q, ms.modes[0], ms);
  CHECK(std::abs(gs) / std::abs(g) == doctest::Approx(std::pow(10.0, -23.0 / 20.0)));
  CHECK(spurious_amplitude(0.0) == 1.0);
  CHECK(spurious_amplitude(20.0) == doctest::Approx(0.1));

  // The time-dependent coefficient follows the envelope and vanishes outside it.
  ms.modes[0].spectator = false;
  ms.envelope.amplitude = 0.5;
  CHECK(std::abs(coupling_coefficient(q, ms.modes[0], ms, 1e-7) - 0.5 * g) < 1e-6);
  CHECK(coupling_coefficient(q, ms.modes[0], ms, 2.0) == cplx(0.0));
}

TEST_CASE("dressing angle") {
  QubitSpec q;
  q.drive_amplitude = 1.0;
  q.drive_detuning = 1.0;
  CHECK(dressing_angle(q).theta == doctest::Approx(std::numbers::pi / 4));
  CHECK_FALSE(dressing_angle(q).singular);
  q.drive_detuning = 0.0;
  CHECK(dressing_angle(q).singular);
  CHECK(dressing_angle(q).theta == doctest::Approx(std::numbers::pi / 2));
  q.drive_amplitude = 0.0;
  CHECK_FALSE(dressing_angle(q).singular);
  q.drive_detuning = -2.0;
  q.drive_amplitude = 2.0;
  CHECK(dressing_angle(q).theta == doctest::Approx(3 * std::numbers::pi / 4));
}

TEST_CASE("metasurface validation errors") {
  MetasurfaceConfig ms = testing::reference_metasurface();
  CHECK_NOTHROW(validate(ms));
  auto bad = ms;
  bad.modes.push_back(bad.modes[0]);
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = ms;
  bad.modes[0].truncation = 1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = ms;
  bad.modes[0].loss_rate = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = ms;
  bad.isolation_db = -3.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = ms;
  bad.envelope.amplitude = 1.5;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = ms;
  bad.envelope.duration = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  CHECK(ms.mode_detuning(0) == doctest::Approx(kTwoPi * 200e6));
}

TEST_CASE("property: |T| never exceeds |T0| for decaying models") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.2, 0.2), len(1e-3, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 r(u(rng), u(rng), u(rng));
    const Vec3 k(u(rng), u(rng), u(rng));
    const ExponentialTransmission e{cplx(0.6, 0.3), len(rng)};
    const GaussianTransmission g{cplx(0.6, 0.3), len(rng)};
    CHECK(std::abs(transmission_at(e, k, r)) <= std::abs(e.t0) + 1e-15);
    CHECK(std::abs(transmission_at(g, k, r)) <= std::abs(g.t0) + 1e-15);
  }
}
