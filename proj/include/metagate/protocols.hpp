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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "metagate/dynamics.hpp"
#include "metagate/hamiltonians.hpp"

namespace metagate {

enum class PhaseConditionMode { AsWritten, CrossTerm };
std::string_view to_string(PhaseConditionMode m);

enum class GateKind { ISwap, Cz };
std::string_view to_string(GateKind g);

/// Ideal targets; global phase is irrelevant to every fidelity used here.
Operator ideal_iswap();
Operator ideal_cz();

/// π/(2|j|).
double iswap_duration(double j);

/// Phase condition solved for τ. AsWritten uses Σ_μ (2λ_iμ + 2λ_jμ)²/(4|ε_μ|); CrossTerm
/// uses the conditional rate Σ_μ 8 λ_iμ λ_jμ cos(φ_iμ − φ_jμ)/ε_μ, for which the
/// closed-form conditional phase reaches π at τ.
double cz_duration(const LambdaCoefficients& lambdas, QubitPair pair,
                   const std::vector<double>& mode_detunings, PhaseConditionMode mode);
double cz_duration(const SystemLayout& layout, QubitPair pair, PhaseConditionMode mode);

struct ClosedLoop {
  std::int64_t n = 0;
  double residual = 0.0;  // |ετ/2π − n|, in [0, 0.5]
};
ClosedLoop closed_loop_check(double eps, double tau);

/// (8 λ_i λ_j / ε)(τ − sin(ετ)/ε) for H = ε b†b + (λ_i Z_i + λ_j Z_j)(b + b†).
double conditional_phase_closed_form(double lam_i, double lam_j, double eps, double tau);

/// π|ε| / (|g_i g_j| |T|²), with t_abs = |T|.
double interaction_time_estimate(double gi, double gj, double t_abs, double eps);
/// π / (4|J_ij|).
double interaction_time_from_coupling(double j_ij);

/// Ratio between raised-cosine and square gate durations that keeps ∫δ² fixed.
double envelope_stretch(EnvelopeShape shape);

struct GateOptions {
  CouplingConvention convention;
  PhaseConditionMode phase_mode = PhaseConditionMode::CrossTerm;
  bool snap_closed_loop = false;
  bool dissipation = true;
  bool include_dispersive = true;
};

struct GateReport {
  GateKind gate = GateKind::ISwap;
  double duration = 0.0;
  double j_used = 0.0;
  CouplingConvention convention;
  PhaseConditionMode phase_mode = PhaseConditionMode::CrossTerm;
  // Headline numbers: from the dissipative channel when dissipation ran.
  double fidelity_avg = 0.0;
  double fidelity_after_local_z = 0.0;
  double leakage = 0.0;
  std::optional<double> conditional_phase;
  std::optional<std::int64_t> closed_loop_n;
  double residual_mode_excitation = 0.0;

  bool dissipative = false;
  double closed_fidelity_avg = 0.0;
  double closed_fidelity_after_local_z = 0.0;
  double envelope_amplitude = 0.0;
  // CZ only; zero otherwise. Infinite when the mode has no conditional term.
  double cz_duration_as_written = 0.0;
  double cz_duration_cross_term = 0.0;
  // Largest population change in the gate block when every mode gets two more
  // levels; empty when the check is disabled or there are no modes.
  std::optional<double> truncation_deviation;
  Operator block;
};

/// Duration from J, full co-rotating propagation with the envelope on for τ,
/// scored against iSWAP; Lindblad channel when T1 or κ is finite.
GateReport run_iswap_gate(const SystemLayout& layout, QubitPair pair,
                          const EvolutionSettings& settings, const GateOptions& options = {});

/// Duration from the phase condition (optionally snapped to ε τ = 2πn with the envelope
/// amplitude rescaled to keep a π conditional phase), dressed-basis propagation
/// with optional dispersive terms, scored against CZ.
GateReport run_cz_gate(const SystemLayout& layout, QubitPair pair,
                       const EvolutionSettings& settings, const GateOptions& options = {});

/// Largest over the four computational inputs of 1 − P(all modes in vacuum).
double residual_mode_excitation(const Operator& u_full, const SystemLayout& layout,
                                QubitPair pair);

/// arg b00 + arg b11 − arg b01 − arg b10 of a diagonal-dominant block, in [0, 2π).
double conditional_phase_of(const Operator& block);

}  // namespace metagate
