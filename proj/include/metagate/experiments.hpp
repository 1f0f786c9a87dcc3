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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "metagate/dynamics.hpp"
#include "metagate/protocols.hpp"

namespace metagate {

/// Everything a gate-level experiment needs besides its own parameters.
struct ExperimentSetup {
  SystemLayout layout;
  QubitPair pair;
  EvolutionSettings evolution;
  GateOptions gate;
};

struct SweepRow {
  double separation = 0.0;  // m
  double j_eff = 0.0;       // rad/s
  double j_ij = 0.0;        // rad/s
  double gate_time = 0.0;   // s
  double fidelity_iswap = 0.0;
  double fidelity_cz = 0.0;
  double leakage = 0.0;
  std::string error;  // empty unless the row failed; numbers are NaN then
};

struct SweepTable {
  std::vector<SweepRow> rows;

  /// Separations strictly increasing, fidelities in [0, 1] (NaN allowed on
  /// failed rows). Throws std::invalid_argument otherwise.
  void validate() const;

  void write_csv(std::ostream& os) const;
  static SweepTable parse_csv(std::istream& is);

  /// Field-wise equality treating NaN as equal to NaN.
  friend bool operator==(const SweepTable& a, const SweepTable& b);
};

inline constexpr const char* kSweepHeader =
    "d_m,j_eff_rad_s,j_ij_rad_s,gate_time_s,f_iswap,f_cz,leakage,error";
inline constexpr const char* kExchangeHeader = "t_s,p01_eff,p10_eff,p01_full,p10_full,leakage";

/// Shortest decimal form that parses back to the same double; "nan" for NaN.
std::string format_double(double x);

/// Copy of `layout` with the pair at z = −d/2 and z = +d/2 (x, y kept).
SystemLayout place_pair(const SystemLayout& layout, QubitPair pair, double separation);

/// One row per separation, evaluated concurrently on up to `threads` workers
/// (0 = hardware concurrency); row order is always by separation. A row whose
/// gates throw carries NaN numbers and the error text.
SweepTable distance_sweep(const ExperimentSetup& setup, double d_min, double d_max,
                          std::size_t points, std::size_t threads = 0);

/// Exchange dynamics with J from the coupling convention and the
/// detuning (ω_first − ω_second)/2.
Trajectory<StateVector> exchange_experiment(const ExperimentSetup& setup, double t_max,
                                            std::size_t points);
void write_exchange_csv(const Trajectory<StateVector>& traj, std::ostream& os);
/// As above and writes the CSV to `path`; throws std::runtime_error on I/O failure.
Trajectory<StateVector> exchange_experiment(const ExperimentSetup& setup, double t_max,
                                            std::size_t points,
                                            const std::filesystem::path& path);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string bound;  // e.g. "<= 1e-12"
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const;
  /// One line per check: name, status, value, bound; then an overall line.
  void write(std::ostream& os) const;
};

/// Conditional phase of H = ε b†b + (λ_i Z_i + λ_j Z_j)(b + b†) obtained by
/// propagating the two-qubit, one-mode model with `levels` Fock states.
double numeric_conditional_phase(double lam_i, double lam_j, double eps, double tau,
                                 std::size_t levels, const EvolutionSettings& settings);

/// Runs every structural and oracle check against the setup.
ValidationReport validate(const ExperimentSetup& setup);

}  // namespace metagate
