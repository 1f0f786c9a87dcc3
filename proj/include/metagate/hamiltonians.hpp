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
#include <functional>
#include <string_view>
#include <vector>

#include "metagate/metasurface.hpp"
#include "metagate/operator.hpp"

namespace metagate {

inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Positions of the two gate qubits within SystemLayout::qubits().
struct QubitPair {
  std::size_t first = 0;
  std::size_t second = 1;
  friend bool operator==(const QubitPair&, const QubitPair&) = default;
};

/// Qubits plus metasurface, with one Hilbert factor per qubit and per mode.
class SystemLayout {
 public:
  SystemLayout(std::vector<QubitSpec> qubits, MetasurfaceConfig metasurface,
               std::size_t dimension_cap = kDefaultDimensionCap);

  const std::vector<QubitSpec>& qubits() const { return qubits_; }
  const MetasurfaceConfig& metasurface() const { return metasurface_; }
  const HilbertOrdering& ordering() const { return ordering_; }
  std::size_t dimension_cap() const { return dimension_cap_; }

  /// ω_first − ω_second.
  double inter_qubit_detuning(QubitPair pair) const;
  void check_pair(QubitPair pair) const;

  SystemLayout with_envelope(const ModulationEnvelope& envelope) const;
  SystemLayout with_qubits(std::vector<QubitSpec> qubits) const;
  SystemLayout with_modes(std::vector<ModeSpec> modes) const;
  /// Every mode truncation increased by `extra` levels.
  SystemLayout with_extra_levels(std::size_t extra) const;

 private:
  std::vector<QubitSpec> qubits_;
  MetasurfaceConfig metasurface_;
  std::size_t dimension_cap_;
  HilbertOrdering ordering_;
};

/// Replaces every mode by a counter-propagating sideband pair at k ± k_m ẑ with
/// couplings scaled by 1/√2, so that mode-mediated exchange between qubits at
/// z1, z2 carries cos(k_m (z1 − z2)). Identity when k_m = 0.
SystemLayout sideband_expanded(const SystemLayout& layout);

using HamiltonianSource = std::function<Operator(double)>;

/// Interaction-picture Hamiltonian with explicit e^{i(ω_i−ν_μ)t} phases.
HamiltonianSource interaction_hamiltonian_source(const SystemLayout& layout);
Operator interaction_hamiltonian(const SystemLayout& layout, double t);

/// The same dynamics in the frame that removes the explicit phases: modes at
/// 2ε_μ, qubits at ω_i − ω_d. Time dependence enters only through δ(t).
HamiltonianSource corotating_hamiltonian_source(const SystemLayout& layout);
Operator corotating_hamiltonian(const SystemLayout& layout, double t);

/// Diagonal generator B with ψ_interaction(t) = exp(−iBt) ψ_corotating(t).
Operator corotating_frame_generator(const SystemLayout& layout);

/// Longitudinal couplings λ_{iμ} = |g_{iμ}| |sin θ_i| / 2 and quadrature phases.
struct LambdaCoefficients {
  Eigen::MatrixXd lambda;  // qubits x modes, rad/s, >= 0
  Eigen::MatrixXd phase;   // qubits x modes, radians
};

LambdaCoefficients lambda_coefficients(const SystemLayout& layout, double envelope_value);

/// Dressed-basis Hamiltonian ε b†b + λ Z (b e^{iφ} + h.c.). The default envelope value is the plateau
/// amplitude.
Operator dressed_hamiltonian(const SystemLayout& layout);
Operator dressed_hamiltonian(const SystemLayout& layout, double envelope_value);

/// Dispersive shifts f_{iμ} = |g_{iμ}|²/Δ_i (qubits x modes) at the given envelope value.
Eigen::MatrixXd dispersive_shifts(const SystemLayout& layout);
Eigen::MatrixXd dispersive_shifts(const SystemLayout& layout, double envelope_value);
Operator dispersive_operator(const SystemLayout& layout, double envelope_value);

/// Dressed Hamiltonian plus optional dispersive terms, following the envelope in time.
HamiltonianSource geometric_phase_hamiltonian_source(const SystemLayout& layout,
                                                     bool include_dispersive);

struct CouplingConvention {
  enum class Variant { Literal, DispersiveNormalized };
  Variant variant = Variant::DispersiveNormalized;
  // Literal variant only; zero selects |ε_μ|.
  double normalization_frequency = 0.0;

  friend bool operator==(const CouplingConvention&, const CouplingConvention&) = default;
};

std::string_view to_string(CouplingConvention::Variant v);

/// Exchange coupling through one mode.
double j_eff(const QubitSpec& q1, const QubitSpec& q2, const ModeSpec& mode,
             const MetasurfaceConfig& cfg, CouplingConvention conv);

/// Σ_μ sign(ε_μ) j_eff over all modes of the layout.
double pair_exchange_coupling(const SystemLayout& layout, QubitPair pair, CouplingConvention conv);

/// |J_ij| from the mode-sum formula.
double j_ij(const QubitSpec& qi, const QubitSpec& qj, const SystemLayout& layout);

/// Detuned exchange model on the first two qubit factors: (J/2)(X1X2+Y1Y2) − (Δ/2)(Z1−Z2), 4x4.
Operator iswap_hamiltonian(double j, double delta, const HilbertOrdering& ordering);
/// Resonant effective exchange J (σ+σ− + σ−σ+).
Operator effective_exchange(double j, const HilbertOrdering& ordering);

}  // namespace metagate
