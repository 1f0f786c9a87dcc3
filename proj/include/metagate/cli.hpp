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

#include <iosfwd>
#include <string>
#include <vector>

#include "metagate/protocols.hpp"

namespace metagate {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `metagate` binary. `args` excludes the program name.
/// Returns 0 on success, 1 on config/validation/check failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Plain-text "key: value" rendering of a gate report.
void write_gate_report(const GateReport& report, std::ostream& os);

struct PhaseMatch {
  double separation = 0.0;  // |z2 − z1|, m
  double k_m = 0.0;         // rad/m, nearest 2πn/separation to the configured value
  long long n = 0;
  double cos_before = 1.0;
  double cos_after = 1.0;
};

/// Modulation wavevector nearest `k_m_configured` with cos(k_m Δz) = 1.
PhaseMatch phase_match(double separation, double k_m_configured);

}  // namespace metagate
