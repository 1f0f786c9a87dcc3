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

#include "metagate/metasurface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

namespace metagate {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_t0(cplx t0) {
  if (std::abs(t0) > 1.0 + 1e-15) throw std::invalid_argument("transmission: |T0| exceeds 1");
}

}  // namespace

void validate_transmission(const TransmissionModel& model) {
  std::visit(overloaded{
                 [](const UniformTransmission& m) { check_t0(m.t0); },
                 [](const ExponentialTransmission& m) {
                   check_t0(m.t0);
                   if (!(m.length > 0.0)) throw std::invalid_argument("transmission: length <= 0");
                 },
                 [](const GaussianTransmission& m) {
                   check_t0(m.t0);
                   if (!(m.waist > 0.0)) throw std::invalid_argument("transmission: waist <= 0");
                 },
                 [](const TabulatedTransmission& m) {
                   if (m.samples.size() < 2) {
                     throw std::invalid_argument("transmission: need at least two samples");
                   }
                   for (std::size_t i = 0; i < m.samples.size(); ++i) {
                     check_t0(m.samples[i].second);
                     if (i > 0 && !(m.samples[i].first > m.samples[i - 1].first)) {
                       throw std::invalid_argument(
                           "transmission: samples not strictly sorted by abscissa");
                     }
                   }
                 },
             },
             model);
}

cplx transmission_at(const TransmissionModel& model, const Vec3& wavevector, const Vec3& position) {
  return std::visit(
      overloaded{
          [](const UniformTransmission& m) { return m.t0; },
          [&](const ExponentialTransmission& m) {
            return m.t0 * std::exp(-position.norm() / m.length);
          },
          [&](const GaussianTransmission& m) {
            Vec3 perp = position;
            const double kn = wavevector.norm();
            if (kn > 0.0) {
              const Vec3 khat = wavevector / kn;
              perp -= khat * khat.dot(position);
            }
            return m.t0 * std::exp(-perp.squaredNorm() / (m.waist * m.waist));
          },
          [&](const TabulatedTransmission& m) {
            const double x = wavevector.dot(position);
            const auto& s = m.samples;
            if (s.empty() || x < s.front().first || x > s.back().first) {
              throw std::out_of_range("transmission: tabulated argument " + std::to_string(x) +
                                      " outside sample range");
            }
            auto hi = std::lower_bound(s.begin(), s.end(), x,
                                       [](const auto& p, double v) { return p.first < v; });
            if (hi == s.begin()) return hi->second;
            auto lo = std::prev(hi);
            const double w = (x - lo->first) / (hi->first - lo->first);
            return (1.0 - w) * lo->second + w * hi->second;
          },
      },
      model);
}

double ModulationEnvelope::value_at(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  switch (shape) {
    case EnvelopeShape::Square:
      return amplitude;
    case EnvelopeShape::RaisedCosine: {
      const double s = std::sin(std::numbers::pi * t / duration);
      return amplitude * s * s;
    }
  }
  return 0.0;
}

double ModulationEnvelope::mean_square_shape() const {
  // <sin^4> over a half period is 3/8.
  return shape == EnvelopeShape::Square ? 1.0 : 3.0 / 8.0;
}

void validate(const MetasurfaceConfig& cfg) {
  std::set<int> seen;
  for (const auto& m : cfg.modes) {
    if (!seen.insert(m.index).second) {
      throw std::invalid_argument("metasurface: duplicate mode index " + std::to_string(m.index));
    }
    if (m.truncation < 2) throw std::invalid_argument("metasurface: mode truncation < 2");
    if (m.loss_rate < 0.0) throw std::invalid_argument("metasurface: negative loss rate");
  }
  if (!(cfg.isolation_db >= 0.0)) throw std::invalid_argument("metasurface: isolation_db < 0");
  const auto& e = cfg.envelope;
  if (!(e.amplitude >= 0.0 && e.amplitude <= 1.0)) {
    throw std::invalid_argument("metasurface: envelope amplitude outside [0,1]");
  }
  if (!(e.duration > 0.0)) throw std::invalid_argument("metasurface: envelope duration <= 0");
  validate_transmission(cfg.transmission);
}

double spurious_amplitude(double isolation_db) { return std::pow(10.0, -isolation_db / 20.0); }

cplx static_coupling(const QubitSpec& q, const ModeSpec& m, const MetasurfaceConfig& cfg) {
  const double phase = m.wavevector.dot(q.position);
  cplx g = q.bare_coupling * transmission_at(cfg.transmission, m.wavevector, q.position) *
           std::exp(kI * phase) * m.coupling_scale;
  if (m.spectator) g *= spurious_amplitude(cfg.isolation_db);
  return g;
}

cplx coupling_coefficient(const QubitSpec& q, const ModeSpec& m, const MetasurfaceConfig& cfg,
                          double t) {
  const double envelope = cfg.envelope.value_at(t);
  if (envelope == 0.0) return 0.0;
  return static_coupling(q, m, cfg) * envelope;
}

DressingAngle dressing_angle(const QubitSpec& q) {
  DressingAngle out;
  out.theta = std::atan2(q.drive_amplitude, q.drive_detuning);
  out.singular = q.drive_detuning == 0.0 && q.drive_amplitude != 0.0;
  return out;
}

double calibrate_length(double target_ratio, double separation) {
  if (!(target_ratio > 0.0 && target_ratio < 1.0)) {
    throw std::invalid_argument("calibrate_length: target ratio must lie in (0,1)");
  }
  if (!(separation > 0.0)) throw std::invalid_argument("calibrate_length: separation must be > 0");
  return separation / -std::log(target_ratio);
}

}  // namespace metagate
