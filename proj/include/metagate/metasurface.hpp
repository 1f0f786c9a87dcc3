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

#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "metagate/operator.hpp"

namespace metagate {

using Vec3 = Eigen::Vector3d;

/// All frequencies are angular (rad/s); positions in metres.
struct QubitSpec {
  int index = 0;
  double frequency = 0.0;
  Vec3 position = Vec3::Zero();
  double bare_coupling = 0.0;
  double drive_amplitude = 0.0;
  double drive_detuning = 0.0;
  double t1 = std::numeric_limits<double>::infinity();

  friend bool operator==(const QubitSpec&, const QubitSpec&) = default;
};

struct ModeSpec {
  int index = 0;
  double frequency = 0.0;
  Vec3 wavevector = Vec3::Zero();
  double loss_rate = 0.0;
  std::size_t truncation = 6;
  // Non-target mode; its coupling is suppressed by the isolation figure.
  bool spectator = false;
  // Amplitude split for sideband pairs; not a user-facing parameter.
  double coupling_scale = 1.0;

  friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

struct UniformTransmission {
  cplx t0{1.0, 0.0};
  friend bool operator==(const UniformTransmission&, const UniformTransmission&) = default;
};

/// T0 * exp(-|r| / length).
struct ExponentialTransmission {
  cplx t0{1.0, 0.0};
  double length = 1.0;
  friend bool operator==(const ExponentialTransmission&, const ExponentialTransmission&) = default;
};

/// T0 * exp(-|r_perp|^2 / waist^2), r_perp transverse to the mode wavevector.
struct GaussianTransmission {
  cplx t0{1.0, 0.0};
  double waist = 1.0;
  friend bool operator==(const GaussianTransmission&, const GaussianTransmission&) = default;
};

/// Linear interpolation in the scalar argument k.r.
struct TabulatedTransmission {
  std::vector<std::pair<double, cplx>> samples;
  friend bool operator==(const TabulatedTransmission&, const TabulatedTransmission&) = default;
};

using TransmissionModel = std::variant<UniformTransmission, ExponentialTransmission,
                                       GaussianTransmission, TabulatedTransmission>;

/// Throws std::invalid_argument if |T0| > 1, lengths are non-positive, or
/// tabulated samples are unsorted.
void validate_transmission(const TransmissionModel& model);

cplx transmission_at(const TransmissionModel& model, const Vec3& wavevector, const Vec3& position);

enum class EnvelopeShape { Square, RaisedCosine };

struct ModulationEnvelope {
  EnvelopeShape shape = EnvelopeShape::Square;
  double amplitude = 1.0;
  double duration = 1e-6;
  // Modulation wavevector along z (rad/m).
  double k_m = 0.0;

  /// Envelope value in [0, amplitude]; zero outside [0, duration].
  double value_at(double t) const;
  /// Time average of (value/amplitude)^2 over the pulse.
  double mean_square_shape() const;

  friend bool operator==(const ModulationEnvelope&, const ModulationEnvelope&) = default;
};

struct MetasurfaceConfig {
  std::vector<ModeSpec> modes;
  TransmissionModel transmission = UniformTransmission{};
  ModulationEnvelope envelope;
  double drive_reference = 0.0;
  double isolation_db = 23.0;

  /// ε_μ = ν_μ − ω_d.
  double mode_detuning(std::size_t mode) const { return modes.at(mode).frequency - drive_reference; }

  friend bool operator==(const MetasurfaceConfig&, const MetasurfaceConfig&) = default;
};

void validate(const MetasurfaceConfig& cfg);

/// 10^(-dB/20).
double spurious_amplitude(double isolation_db);

/// Envelope-free coupling g⁽⁰⁾ T(k·r) e^{ik·r}, including spectator suppression.
cplx static_coupling(const QubitSpec& q, const ModeSpec& m, const MetasurfaceConfig& cfg);

/// g_{iμ}(t): static coupling times the modulation envelope.
cplx coupling_coefficient(const QubitSpec& q, const ModeSpec& m, const MetasurfaceConfig& cfg,
                          double t);

struct DressingAngle {
  double theta = 0.0;
  // Resonant drive (Δ = 0, Ω ≠ 0): the dressed-basis reduction is degenerate.
  bool singular = false;
};

/// tan θ = Ω/Δ, θ = atan2(Ω, Δ).
DressingAngle dressing_angle(const QubitSpec& q);

/// Exponential decay length L for which J(separation)/J(0) = target_ratio with
/// qubits at ±separation/2.
double calibrate_length(double target_ratio, double separation);

}  // namespace metagate
