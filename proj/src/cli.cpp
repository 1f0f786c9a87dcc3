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

#include "metagate/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "metagate/config.hpp"
#include "metagate/experiments.hpp"

namespace metagate {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Writes to --out when given, otherwise to `fallback`.
void emit(const std::string& out_path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& body) {
  if (out_path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  body(os);
  os.flush();
  if (!os) throw std::runtime_error("write to '" + out_path + "' failed");
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_double(*v) : "none";
}

}  // namespace

void write_gate_report(const GateReport& r, std::ostream& os) {
  os << "gate: " << to_string(r.gate) << '\n'
     << "duration_s: " << format_double(r.duration) << '\n'
     << "j_used_rad_s: " << format_double(r.j_used) << '\n'
     << "convention: " << to_string(r.convention.variant) << '\n';
  if (r.gate == GateKind::Cz) os << "phase_condition: " << to_string(r.phase_mode) << '\n';
  os << "fidelity_metric: average gate fidelity"
     << (r.dissipative ? " of the Lindblad channel" : " of the closed-system block") << '\n'
     << "fidelity_avg: " << format_double(r.fidelity_avg) << '\n'
     << "fidelity_after_local_z: " << format_double(r.fidelity_after_local_z) << '\n'
     << "closed_fidelity_avg: " << format_double(r.closed_fidelity_avg) << '\n'
     << "closed_fidelity_after_local_z: " << format_double(r.closed_fidelity_after_local_z) << '\n'
     << "leakage: " << format_double(r.leakage) << '\n'
     << "conditional_phase_rad: " << optional_number(r.conditional_phase) << '\n'
     << "closed_loop_n: " << (r.closed_loop_n ? std::to_string(*r.closed_loop_n) : "none") << '\n'
     << "residual_mode_excitation: " << format_double(r.residual_mode_excitation) << '\n'
     << "envelope_amplitude: " << format_double(r.envelope_amplitude) << '\n'
     << "truncation_deviation: " << optional_number(r.truncation_deviation) << '\n';
  if (r.gate == GateKind::Cz) {
    os << "cz_duration_as_written_s: " << format_double(r.cz_duration_as_written) << '\n'
       << "cz_duration_cross_term_s: " << format_double(r.cz_duration_cross_term) << '\n';
  }
}

PhaseMatch phase_match(double separation, double k_m_configured) {
  PhaseMatch pm;
  pm.separation = std::abs(separation);
  pm.cos_before = std::cos(k_m_configured * pm.separation);
  if (pm.separation == 0.0) {
    // Every k_m is phase matched when the qubits share a z coordinate.
    pm.k_m = k_m_configured;
    return pm;
  }
  const double period = kTwoPi / pm.separation;
  pm.n = std::llround(k_m_configured / period);
  pm.k_m = static_cast<double>(pm.n) * period;
  pm.cos_after = std::cos(pm.k_m * pm.separation);
  return pm;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metasurface-mediated two-qubit gate simulator", "metagate"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  double t_max = 0.0, d_min = 0.0, d_max = 0.0;
  std::size_t points = 0, threads = 0;
  bool snap = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration file (JSON, unit-suffixed keys)")
        ->required();
  };

  auto* exchange = app.add_subcommand("exchange", "|01> exchange dynamics, effective and full model");
  add_common(exchange);
  exchange->add_option("--out", out_path, "CSV output path")->required();
  auto* ex_tmax = exchange->add_option("--t-max", t_max, "Time window (s)");
  auto* ex_points = exchange->add_option("--points", points, "Samples (>= 2)");

  auto* gate = app.add_subcommand("gate", "Run one gate and print its report");
  gate->require_subcommand(1);
  auto* iswap = gate->add_subcommand("iswap", "Parametric-exchange iSWAP");
  add_common(iswap);
  iswap->add_option("--out", out_path, "Report path (default stdout)");
  auto* cz = gate->add_subcommand("cz", "Geometric-phase controlled-Z");
  add_common(cz);
  cz->add_option("--out", out_path, "Report path (default stdout)");
  cz->add_flag("--snap-closed-loop", snap, "Snap the duration to eps*tau = 2*pi*n");

  auto* sweep = app.add_subcommand("sweep", "Coupling and fidelity against qubit separation");
  add_common(sweep);
  sweep->add_option("--out", out_path, "CSV output path")->required();
  auto* sw_dmin = sweep->add_option("--d-min", d_min, "Smallest separation (m)");
  auto* sw_dmax = sweep->add_option("--d-max", d_max, "Largest separation (m)");
  auto* sw_points = sweep->add_option("--points", points, "Separations (>= 2)");
  auto* sw_threads = sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* validate_cmd = app.add_subcommand("validate", "Run every structural and oracle check");
  add_common(validate_cmd);
  validate_cmd->add_option("--out", out_path, "Report path (default stdout)");

  auto* design = app.add_subcommand("design", "Design helpers");
  design->require_subcommand(1);
  auto* phase = design->add_subcommand("phase-match", "Nearest k_m with cos(k_m dz) = 1");
  add_common(phase);
  phase->add_option("--out", out_path, "Report path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    RunConfig cfg = parse_config(config_path);

    if (*exchange) {
      if (ex_tmax->count()) cfg.exchange.t_max = t_max;
      if (ex_points->count()) cfg.exchange.points = points;
      if (!(cfg.exchange.t_max > 0.0) || cfg.exchange.points < 2) {
        err << "error: --t-max must be > 0 and --points >= 2\n";
        return kExitUsage;
      }
      const auto traj = exchange_experiment(cfg.setup(), cfg.exchange.t_max, cfg.exchange.points,
                                            out_path);
      out << "wrote " << traj.times.size() << " rows to " << out_path << '\n';
      return kExitOk;
    }
    if (*iswap || *cz) {
      GateOptions opts = cfg.gate_options();
      if (snap) opts.snap_closed_loop = true;
      const GateReport r = *iswap ? run_iswap_gate(cfg.layout(), cfg.pair, cfg.evolution, opts)
                                  : run_cz_gate(cfg.layout(), cfg.pair, cfg.evolution, opts);
      emit(out_path, out, [&](std::ostream& os) { write_gate_report(r, os); });
      return kExitOk;
    }
    if (*sweep) {
      if (sw_dmin->count()) cfg.sweep.d_min = d_min;
      if (sw_dmax->count()) cfg.sweep.d_max = d_max;
      if (sw_points->count()) cfg.sweep.points = points;
      if (sw_threads->count()) cfg.sweep.threads = threads;
      if (!(cfg.sweep.d_min >= 0.0 && cfg.sweep.d_max > cfg.sweep.d_min) || cfg.sweep.points < 2) {
        err << "error: need 0 <= --d-min < --d-max and --points >= 2\n";
        return kExitUsage;
      }
      const SweepTable table = distance_sweep(cfg.setup(), cfg.sweep.d_min, cfg.sweep.d_max,
                                              cfg.sweep.points, cfg.sweep.threads);
      emit(out_path, out, [&](std::ostream& os) { table.write_csv(os); });
      std::size_t failed = 0;
      for (const auto& row : table.rows) failed += row.error.empty() ? 0 : 1;
      out << "wrote " << table.rows.size() << " rows to " << out_path;
      if (failed) out << " (" << failed << " failed)";
      out << '\n';
      return failed ? kExitCheckFailed : kExitOk;
    }
    if (*validate_cmd) {
      const ValidationReport report = validate(cfg.setup());
      emit(out_path, out, [&](std::ostream& os) { report.write(os); });
      return report.passed() ? kExitOk : kExitCheckFailed;
    }
    if (*phase) {
      const auto& q = cfg.qubits;
      const double dz = q[cfg.pair.second].position.z() - q[cfg.pair.first].position.z();
      const PhaseMatch pm = phase_match(dz, cfg.metasurface.envelope.k_m);
      emit(out_path, out, [&](std::ostream& os) {
        os << "separation_z_m: " << format_double(pm.separation) << '\n'
           << "k_m_configured_rad_per_m: " << format_double(cfg.metasurface.envelope.k_m) << '\n'
           << "k_m_phase_matched_rad_per_m: " << format_double(pm.k_m) << '\n'
           << "n: " << pm.n << '\n'
           << "cos_before: " << format_double(pm.cos_before) << '\n'
           << "cos_after: " << format_double(pm.cos_after) << '\n';
      });
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace metagate
