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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metagate/experiments.hpp"

namespace metagate {

struct ExchangeParams {
  double t_max = 2e-6;  // s
  std::size_t points = 401;
  friend bool operator==(const ExchangeParams&, const ExchangeParams&) = default;
};

struct SweepParams {
  double d_min = 0.0;   // m
  double d_max = 0.05;  // m
  std::size_t points = 26;
  std::size_t threads = 0;  // 0 = hardware concurrency
  friend bool operator==(const SweepParams&, const SweepParams&) = default;
};

/// Parsed configuration with every frequency already in rad/s.
struct RunConfig {
  std::vector<QubitSpec> qubits;
  MetasurfaceConfig metasurface;
  EvolutionSettings evolution;
  std::size_t dimension_cap = kDefaultDimensionCap;
  CouplingConvention coupling;
  PhaseConditionMode phase_mode = PhaseConditionMode::CrossTerm;
  QubitPair pair;
  bool snap_closed_loop = false;
  bool dissipation = true;
  bool include_dispersive = true;
  ExchangeParams exchange;
  SweepParams sweep;

  SystemLayout layout() const;
  GateOptions gate_options() const;
  ExperimentSetup setup() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Every problem found in a config, each prefixed with its field path
/// (e.g. "qubits[0].t1_s: must be > 0").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// JSON document with unit-suffixed keys; frequencies in Hz are converted to
/// rad/s here and nowhere else.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

/// Inverse of parse_config_text (frequencies written back in Hz).
std::string serialize_config(const RunConfig& cfg);

/// Field-wise comparison with a relative tolerance on floating values, for
/// round trips through the Hz representation.
bool equivalent(const RunConfig& a, const RunConfig& b, double rel_tol = 1e-14);

}  // namespace metagate
