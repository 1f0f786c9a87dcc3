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

#include "metagate/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace metagate {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

// Σ_μ 8 λ_iμ λ_jμ cos(φ_iμ − φ_jμ)/ε_μ.
double cross_rate(const LambdaCoefficients& lc, QubitPair pair, const std::vector<double>& eps) {
  const auto i = static_cast<Eigen::Index>(pair.first);
  const auto j = static_cast<Eigen::Index>(pair.second);
  double rate = 0.0;
  for (std::size_t m = 0; m < eps.size(); ++m) {
    const auto mm = static_cast<Eigen::Index>(m);
    if (eps[m] == 0.0) throw std::domain_error("cz_duration: zero mode detuning");
    rate += 8.0 * lc.lambda(i, mm) * lc.lambda(j, mm) * std::cos(lc.phase(i, mm) - lc.phase(j, mm)) /
            eps[m];
  }
  return rate;
}

std::vector<double> detunings(const SystemLayout& layout) {
  std::vector<double> eps;
  for (std::size_t m = 0; m < layout.metasurface().modes.size(); ++m) {
    eps.push_back(layout.metasurface().mode_detuning(m));
  }
  return eps;
}

// Flat indices whose mode factors are all in vacuum.
std::vector<Eigen::Index> vacuum_rows(const SystemLayout& layout) {
  const auto& ord = layout.ordering();
  std::vector<Eigen::Index> rows;
  for (std::size_t flat = 0; flat < ord.dimension(); ++flat) {
    const auto lv = ord.levels(flat);
    bool vac = true;
    for (std::size_t f = ord.qubit_count(); f < lv.size() && vac; ++f) vac = lv[f] == 0;
    if (vac) rows.push_back(static_cast<Eigen::Index>(flat));
  }
  return rows;
}

Operator rotate_block(const Operator& block, const std::array<cplx, 4>& r) {
  Matrix m = block.matrix();
  for (Eigen::Index k = 0; k < 4; ++k) m.row(k) *= r[static_cast<std::size_t>(k)];
  return Operator(std::move(m));
}

QubitChannel rotate_channel(QubitChannel ch, const std::array<cplx, 4>& r) {
  for (auto& e : ch.images) {
    for (Eigen::Index k = 0; k < 4; ++k) {
      for (Eigen::Index l = 0; l < 4; ++l) {
        e(k, l) *= r[static_cast<std::size_t>(k)] * std::conj(r[static_cast<std::size_t>(l)]);
      }
    }
  }
  return ch;
}

double block_population_deviation(const SubspaceGate& a, const SubspaceGate& b) {
  const Eigen::MatrixXd pa = a.block.matrix().cwiseAbs2();
  const Eigen::MatrixXd pb = b.block.matrix().cwiseAbs2();
  return std::max((pa - pb).cwiseAbs().maxCoeff(), std::abs(a.leakage - b.leakage));
}

bool has_dissipation(const SystemLayout& layout) { return !collapse_operators(layout).empty(); }

// Fills the fidelity fields from the closed block and, when requested, from
// the Lindblad channel.
void score(GateReport& report, const SubspaceGate& closed, const Operator& ideal,
           const std::optional<QubitChannel>& channel) {
  report.block = closed.block;
  report.leakage = closed.leakage;
  report.closed_fidelity_avg = average_gate_fidelity(closed.block, ideal);
  report.closed_fidelity_after_local_z =
      std::max(fidelity_after_local_z(closed.block, ideal), report.closed_fidelity_avg);
  if (channel) {
    report.dissipative = true;
    report.fidelity_avg = average_gate_fidelity(*channel, ideal);
    report.fidelity_after_local_z =
        std::max(fidelity_after_local_z(*channel, ideal), report.fidelity_avg);
  } else {
    report.fidelity_avg = report.closed_fidelity_avg;
    report.fidelity_after_local_z = report.closed_fidelity_after_local_z;
  }
}

}  // namespace

std::string_view to_string(PhaseConditionMode m) {
  return m == PhaseConditionMode::AsWritten ? "as_written" : "cross_term";
}

std::string_view to_string(GateKind g) { return g == GateKind::ISwap ? "iswap" : "cz"; }

Operator ideal_iswap() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 2) = m(2, 1) = kI;
  return Operator(std::move(m));
}

Operator ideal_cz() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return Operator(std::move(m));
}

double iswap_duration(double j) {
  if (j == 0.0 || !std::isfinite(j)) throw std::domain_error("iswap_duration: J must be nonzero");
  return kPi / (2.0 * std::abs(j));
}

double cz_duration(const LambdaCoefficients& lc, QubitPair pair,
                   const std::vector<double>& mode_detunings, PhaseConditionMode mode) {
  const auto nq = static_cast<std::size_t>(lc.lambda.rows());
  if (pair.first >= nq || pair.second >= nq || pair.first == pair.second) {
    throw std::invalid_argument("cz_duration: invalid qubit pair");
  }
  if (static_cast<std::size_t>(lc.lambda.cols()) != mode_detunings.size()) {
    throw std::invalid_argument("cz_duration: mode count mismatch");
  }
  double rate = 0.0;
  if (mode == PhaseConditionMode::AsWritten) {
    const auto i = static_cast<Eigen::Index>(pair.first);
    const auto j = static_cast<Eigen::Index>(pair.second);
    for (std::size_t m = 0; m < mode_detunings.size(); ++m) {
      const auto mm = static_cast<Eigen::Index>(m);
      if (mode_detunings[m] == 0.0) throw std::domain_error("cz_duration: zero mode detuning");
      const double s = 2.0 * lc.lambda(i, mm) + 2.0 * lc.lambda(j, mm);
      rate += s * s / (4.0 * std::abs(mode_detunings[m]));
    }
  } else {
    rate = std::abs(cross_rate(lc, pair, mode_detunings));
  }
  if (!(rate > 0.0)) throw std::domain_error("cz_duration: no coupling (zero phase rate)");
  return kPi / rate;
}

double cz_duration(const SystemLayout& layout, QubitPair pair, PhaseConditionMode mode) {
  layout.check_pair(pair);
  return cz_duration(lambda_coefficients(layout, 1.0), pair, detunings(layout), mode);
}

ClosedLoop closed_loop_check(double eps, double tau) {
  if (eps == 0.0) throw std::domain_error("closed_loop_check: eps must be nonzero");
  const double turns = eps * tau / kTwoPi;
  const double n = std::round(turns);
  return {static_cast<std::int64_t>(n), std::abs(turns - n)};
}

double conditional_phase_closed_form(double lam_i, double lam_j, double eps, double tau) {
  if (eps == 0.0) throw std::domain_error("conditional_phase_closed_form: eps must be nonzero");
  return 8.0 * lam_i * lam_j / eps * (tau - std::sin(eps * tau) / eps);
}

double interaction_time_estimate(double gi, double gj, double t_abs, double eps) {
  const double denom = std::abs(gi * gj) * t_abs * t_abs;
  if (!(denom > 0.0) || eps == 0.0) {
    throw std::domain_error("interaction_time_estimate: zero coupling, transmission or detuning");
  }
  return kPi * std::abs(eps) / denom;
}

double interaction_time_from_coupling(double j_ij) {
  if (j_ij == 0.0) throw std::domain_error("interaction_time_from_coupling: J must be nonzero");
  return kPi / (4.0 * std::abs(j_ij));
}

double envelope_stretch(EnvelopeShape shape) {
  ModulationEnvelope e;
  e.shape = shape;
  return 1.0 / e.mean_square_shape();
}

double residual_mode_excitation(const Operator& u_full, const SystemLayout& layout,
                                QubitPair pair) {
  if (u_full.dim() != layout.ordering().dimension()) {
    throw std::invalid_argument("residual_mode_excitation: operator does not match layout");
  }
  const auto rows = vacuum_rows(layout);
  double worst = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto c = static_cast<Eigen::Index>(computational_index(layout, pair, k >> 1U, k & 1U));
    double vac = 0.0;
    for (auto r : rows) vac += std::norm(u_full.matrix()(r, c));
    worst = std::max(worst, 1.0 - vac);
  }
  return std::max(0.0, worst);
}

double conditional_phase_of(const Operator& block) {
  if (block.dim() != 4) throw std::invalid_argument("conditional_phase_of: block must be 4x4");
  const Matrix& b = block.matrix();
  return wrap_two_pi(std::arg(b(0, 0)) + std::arg(b(3, 3)) - std::arg(b(1, 1)) - std::arg(b(2, 2)));
}

GateReport run_iswap_gate(const SystemLayout& layout, QubitPair pair,
                          const EvolutionSettings& settings, const GateOptions& options) {
  layout.check_pair(pair);
  GateReport report;
  report.gate = GateKind::ISwap;
  report.convention = options.convention;
  report.phase_mode = options.phase_mode;
  report.j_used = pair_exchange_coupling(layout, pair, options.convention);

  ModulationEnvelope env = layout.metasurface().envelope;
  env.duration = iswap_duration(report.j_used) * envelope_stretch(env.shape);
  report.duration = env.duration;
  report.envelope_amplitude = env.amplitude;

  auto gate_layout = [&](const SystemLayout& base) {
    return sideband_expanded(base.with_envelope(env));
  };
  const SystemLayout full = gate_layout(layout);

  // Back to the interaction frame: a diagonal phase on the qubits.
  const Operator frame = corotating_frame_generator(full);
  std::array<cplx, 4> r{};
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t idx = computational_index(full, pair, k >> 1U, k & 1U);
    r[k] = std::exp(-kI * (frame(idx, idx).real() * env.duration));
  }

  auto closed = [&](const SystemLayout& l) {
    const Operator u = propagate_unitary(corotating_hamiltonian_source(l), 0.0, env.duration,
                                         settings);
    SubspaceGate g = qubit_subspace_gate(u, l, pair);
    g.block = rotate_block(g.block, r);
    return std::pair{g, residual_mode_excitation(u, l, pair)};
  };
  const auto [gate, residual] = closed(full);
  report.residual_mode_excitation = residual;

  if (settings.truncation_check && !layout.metasurface().modes.empty()) {
    const auto [bigger, unused] = closed(gate_layout(layout.with_extra_levels(2)));
    report.truncation_deviation = block_population_deviation(gate, bigger);
  }

  std::optional<QubitChannel> channel;
  if (options.dissipation && has_dissipation(full)) {
    channel = rotate_channel(qubit_subspace_channel(full, pair, corotating_hamiltonian_source(full),
                                                    collapse_operators(full), 0.0, env.duration,
                                                    settings),
                             r);
  }
  score(report, gate, ideal_iswap(), channel);
  return report;
}

GateReport run_cz_gate(const SystemLayout& layout, QubitPair pair,
                       const EvolutionSettings& settings, const GateOptions& options) {
  layout.check_pair(pair);
  if (layout.metasurface().modes.empty()) throw std::invalid_argument("run_cz_gate: no modes");
  for (std::size_t q : {pair.first, pair.second}) {
    if (layout.qubits()[q].drive_detuning == 0.0) {
      throw std::domain_error("run_cz_gate: qubit " + std::to_string(layout.qubits()[q].index) +
                              " has zero drive detuning; dressing undefined");
    }
  }
  GateReport report;
  report.gate = GateKind::Cz;
  report.convention = options.convention;
  report.phase_mode = options.phase_mode;

  // Durations come from the peak couplings; the configured amplitude only
  // enters the propagation (and is replaced when snapping).
  const SystemLayout expanded = sideband_expanded(layout);
  const LambdaCoefficients unit = lambda_coefficients(expanded, 1.0);
  const std::vector<double> eps = detunings(expanded);
  auto safe_duration = [&](PhaseConditionMode m) {
    try {
      return cz_duration(unit, pair, eps, m);
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  report.cz_duration_as_written = safe_duration(PhaseConditionMode::AsWritten);
  report.cz_duration_cross_term = safe_duration(PhaseConditionMode::CrossTerm);

  ModulationEnvelope env = layout.metasurface().envelope;
  const double stretch = envelope_stretch(env.shape);
  env.duration = cz_duration(unit, pair, eps, options.phase_mode) * stretch;

  // Dominant mode: largest conditional coupling.
  std::size_t dom = 0;
  double best = -1.0;
  for (std::size_t m = 0; m < eps.size(); ++m) {
    const auto mm = static_cast<Eigen::Index>(m);
    const double w = unit.lambda(static_cast<Eigen::Index>(pair.first), mm) *
                     unit.lambda(static_cast<Eigen::Index>(pair.second), mm);
    if (w > best) {
      best = w;
      dom = m;
    }
  }

  if (options.snap_closed_loop) {
    if (env.shape != EnvelopeShape::Square) {
      throw std::invalid_argument("run_cz_gate: closed-loop snapping needs a square envelope");
    }
    const double rate1 = std::abs(cross_rate(unit, pair, eps));
    if (!(rate1 > 0.0)) throw std::domain_error("run_cz_gate: no conditional coupling to snap");
    const double period = kTwoPi / std::abs(eps[dom]);
    std::int64_t n = std::max<std::int64_t>(1, closed_loop_check(eps[dom], env.duration).n);
    // φ_cond = A² rate1 τ_n = π fixes A; amplitude must stay within [0, 1].
    double amp = std::sqrt(kPi / (rate1 * static_cast<double>(n) * period));
    while (amp > 1.0) {
      ++n;
      amp = std::sqrt(kPi / (rate1 * static_cast<double>(n) * period));
    }
    env.amplitude = amp;
    env.duration = static_cast<double>(n) * period;
  }
  report.duration = env.duration;
  report.envelope_amplitude = env.amplitude;
  report.closed_loop_n = closed_loop_check(eps[dom], env.duration).n;

  auto gate_layout = [&](const SystemLayout& base) {
    return sideband_expanded(base.with_envelope(env));
  };
  const SystemLayout full = gate_layout(layout);

  auto closed = [&](const SystemLayout& l) {
    const Operator u =
        propagate_unitary(geometric_phase_hamiltonian_source(l, options.include_dispersive), 0.0,
                          env.duration, settings);
    return std::pair{qubit_subspace_gate(u, l, pair), residual_mode_excitation(u, l, pair)};
  };
  const auto [gate, residual] = closed(full);
  report.residual_mode_excitation = residual;
  report.conditional_phase = conditional_phase_of(gate.block);

  if (settings.truncation_check) {
    const auto [bigger, unused] = closed(gate_layout(layout.with_extra_levels(2)));
    report.truncation_deviation = block_population_deviation(gate, bigger);
  }

  std::optional<QubitChannel> channel;
  if (options.dissipation && has_dissipation(full)) {
    channel = qubit_subspace_channel(
        full, pair, geometric_phase_hamiltonian_source(full, options.include_dispersive),
        collapse_operators(full), 0.0, env.duration, settings);
  }
  score(report, gate, ideal_cz(), channel);
  return report;
}

}  // namespace metagate
