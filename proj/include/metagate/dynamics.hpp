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

#include <array>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "metagate/hamiltonians.hpp"
#include "metagate/operator.hpp"

namespace metagate {

struct EvolutionSettings {
  double dt_initial = 1e-9;
  double tolerance = 1e-8;
  int max_step_halvings = 12;
  // Re-run full-model evolutions with every mode truncation raised by two.
  bool truncation_check = true;

  friend bool operator==(const EvolutionSettings&, const EvolutionSettings&) = default;
};

void validate(const EvolutionSettings& settings);

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-ordered propagator from midpoint exponentials, halving the step until
/// successive results agree to `settings.tolerance` in max-norm. Throws
/// ConvergenceError if that never happens or if the result is not unitary.
Operator propagate_unitary(const HamiltonianSource& h, double t0, double t1,
                           const EvolutionSettings& settings);

struct CollapseOperator {
  Operator op;
  double rate = 0.0;  // 1/s
};

/// σ⁻ per qubit at 1/T1 and b per mode at κ; zero-rate channels are omitted.
std::vector<CollapseOperator> collapse_operators(const SystemLayout& layout);

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::map<std::string, std::vector<double>> observables;
};

/// Lindblad evolution recorded at `times` (times[0] is the start). The
/// Hamiltonian part is applied exactly per step through the midpoint
/// exponential; the dissipator is integrated with RK4 in that frame.
/// Observables: "trace", "min_eigenvalue".
Trajectory<DensityMatrix> evolve_lindblad(const DensityMatrix& rho0, const HamiltonianSource& h,
                                          const std::vector<CollapseOperator>& collapse,
                                          const std::vector<double>& times,
                                          const EvolutionSettings& settings);

struct LindbladBatch {
  std::vector<Matrix> finals;
  std::size_t steps = 0;
};

/// Evolves many inputs over [t0, t1] with one shared step size, chosen by
/// step halving on `probe`. Inputs need not be density matrices.
LindbladBatch evolve_lindblad_batch(const Matrix& probe, const std::vector<Matrix>& inputs,
                                    const HamiltonianSource& h,
                                    const std::vector<CollapseOperator>& collapse, double t0,
                                    double t1, const EvolutionSettings& settings);

struct SubspaceGate {
  Operator block;  // 4x4, not renormalised
  double leakage = 0.0;
};

/// Flat index of |a b⟩ on the pair with every other factor in its ground state.
std::size_t computational_index(const SystemLayout& layout, QubitPair pair, std::size_t a,
                                std::size_t b);

/// Restriction of u_full to {|q1 q2⟩ ⊗ |vac⟩}; leakage is 1 minus the smallest
/// column norm² kept in the subspace.
SubspaceGate qubit_subspace_gate(const Operator& u_full, const SystemLayout& layout,
                                 QubitPair pair = {});

/// Two-qubit channel stored as the images of |i⟩⟨j|, i, j in {00,01,10,11}.
struct QubitChannel {
  std::array<Matrix, 16> images;

  const Matrix& image(std::size_t i, std::size_t j) const { return images[4 * i + j]; }
  static QubitChannel from_unitary(const Operator& block);
};

/// Lindblad evolution of |i⟩⟨j| ⊗ |vac⟩⟨vac| followed by a partial trace onto
/// the pair.
QubitChannel qubit_subspace_channel(const SystemLayout& layout, QubitPair pair,
                                    const HamiltonianSource& h,
                                    const std::vector<CollapseOperator>& collapse, double t0,
                                    double t1, const EvolutionSettings& settings);

/// (|Tr(V†A)|² + d)/(d(d+1)), d = 4.
double average_gate_fidelity(const Operator& actual, const Operator& ideal);
/// (d F_e + 1)/(d + 1) with the entanglement fidelity F_e of the channel.
double average_gate_fidelity(const QubitChannel& actual, const Operator& ideal);

struct LocalZFit {
  double fidelity = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

/// Z(φ) = diag(1, e^{iφ}).
Operator local_z(double phi1, double phi2);

/// Best fidelity of (Z(φ1)⊗Z(φ2))·actual against ideal: 64x64 grid followed by
/// a pattern search. Never below the uncorrected fidelity.
LocalZFit fit_local_z(const Operator& actual, const Operator& ideal);
LocalZFit fit_local_z(const QubitChannel& actual, const Operator& ideal);
double fidelity_after_local_z(const Operator& actual, const Operator& ideal);
double fidelity_after_local_z(const QubitChannel& actual, const Operator& ideal);

/// |01⟩ evolved under the detuned exchange model with (j, delta) and, when the layout has
/// modes, under the full co-rotating model with the coupling held on for the
/// whole window. Observables: p01_eff, p10_eff, p01_full, p10_full, leakage
/// (the full columns equal the effective ones when there are no modes). States
/// are the effective two-qubit states.
Trajectory<StateVector> exchange_population_series(const SystemLayout& layout, QubitPair pair,
                                                   double j, double delta, double t_max,
                                                   std::size_t points,
                                                   const EvolutionSettings& settings);

}  // namespace metagate
