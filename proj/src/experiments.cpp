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

#include "metagate/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace metagate {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

double parse_double(const std::string& field, std::size_t line, const char* column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw std::invalid_argument("csv line " + std::to_string(line) + ": bad number '" + field +
                                "' in column " + column);
  }
  return v;
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// RFC 4180 records: quoted fields may hold commas, quotes and newlines.
std::vector<std::vector<std::string>> read_records(std::istream& is) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, any = false;
  char c = 0;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

double max_pair_coupling_ratio(const SystemLayout& layout, QubitPair pair) {
  const auto& ms = layout.metasurface();
  double r = 0.0;
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    const double eps = std::abs(ms.mode_detuning(m));
    for (std::size_t q : {pair.first, pair.second}) {
      r = std::max(r, std::abs(static_coupling(layout.qubits()[q], ms.modes[m], ms)) / eps);
    }
  }
  return r;
}

// Copy with the pair's bare couplings scaled so max |g|/|ε| equals `ratio`.
SystemLayout with_coupling_ratio(const SystemLayout& layout, QubitPair pair, double ratio) {
  const double now = max_pair_coupling_ratio(layout, pair);
  if (!(now > 0.0)) throw std::domain_error("coupling ratio: layout has no coupling");
  auto qubits = layout.qubits();
  for (std::size_t q : {pair.first, pair.second}) qubits[q].bare_coupling *= ratio / now;
  return layout.with_qubits(std::move(qubits));
}

std::size_t dominant_mode(const SystemLayout& layout) {
  const auto& modes = layout.metasurface().modes;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (!modes[m].spectator) return m;
  }
  return 0;
}

std::string sci(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

ValidationCheck check_le(std::string name, double value, double bound, std::string note = {}) {
  return {std::move(name), value <= bound, value, "<=" + sci(bound), std::move(note)};
}

ValidationCheck check_lt(std::string name, double value, double bound, std::string note = {}) {
  return {std::move(name), value < bound, value, "<" + sci(bound), std::move(note)};
}

ValidationCheck check_ge(std::string name, double value, double bound, std::string note = {}) {
  return {std::move(name), value >= bound, value, ">=" + sci(bound), std::move(note)};
}

ValidationCheck failed(std::string name, const std::string& bound, const std::exception& e) {
  return {std::move(name), false, kNaN, bound, e.what()};
}

double wrap_pi(double x) { return std::remainder(x, 2.0 * kPi); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void SweepTable::validate() const {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (k > 0 && !(r.separation > rows[k - 1].separation)) {
      throw std::invalid_argument("sweep table: separations not strictly increasing at row " +
                                  std::to_string(k));
    }
    for (double f : {r.fidelity_iswap, r.fidelity_cz}) {
      if (!std::isnan(f) && (f < 0.0 || f > 1.0)) {
        throw std::invalid_argument("sweep table: fidelity outside [0,1] at row " +
                                    std::to_string(k));
      }
    }
  }
}

void SweepTable::write_csv(std::ostream& os) const {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << format_double(r.separation) << ',' << format_double(r.j_eff) << ','
       << format_double(r.j_ij) << ',' << format_double(r.gate_time) << ','
       << format_double(r.fidelity_iswap) << ',' << format_double(r.fidelity_cz) << ','
       << format_double(r.leakage) << ',' << quote_field(r.error) << '\n';
  }
}

SweepTable SweepTable::parse_csv(std::istream& is) {
  const auto records = read_records(is);
  if (records.empty()) throw std::invalid_argument("csv: empty input");
  std::string header;
  for (std::size_t k = 0; k < records[0].size(); ++k) header += (k ? "," : "") + records[0][k];
  if (header != kSweepHeader) throw std::invalid_argument("csv: unexpected header '" + header + "'");
  SweepTable t;
  for (std::size_t n = 1; n < records.size(); ++n) {
    const auto& f = records[n];
    if (f.size() != 8) {
      throw std::invalid_argument("csv line " + std::to_string(n + 1) + ": expected 8 fields");
    }
    SweepRow r;
    r.separation = parse_double(f[0], n + 1, "d_m");
    r.j_eff = parse_double(f[1], n + 1, "j_eff_rad_s");
    r.j_ij = parse_double(f[2], n + 1, "j_ij_rad_s");
    r.gate_time = parse_double(f[3], n + 1, "gate_time_s");
    r.fidelity_iswap = parse_double(f[4], n + 1, "f_iswap");
    r.fidelity_cz = parse_double(f[5], n + 1, "f_cz");
    r.leakage = parse_double(f[6], n + 1, "leakage");
    r.error = f[7];
    t.rows.push_back(std::move(r));
  }
  t.validate();
  return t;
}

bool operator==(const SweepTable& a, const SweepTable& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    const auto& x = a.rows[k];
    const auto& y = b.rows[k];
    if (!(same(x.separation, y.separation) && same(x.j_eff, y.j_eff) && same(x.j_ij, y.j_ij) &&
          same(x.gate_time, y.gate_time) && same(x.fidelity_iswap, y.fidelity_iswap) &&
          same(x.fidelity_cz, y.fidelity_cz) && same(x.leakage, y.leakage) &&
          x.error == y.error)) {
      return false;
    }
  }
  return true;
}

SystemLayout place_pair(const SystemLayout& layout, QubitPair pair, double separation) {
  layout.check_pair(pair);
  auto qubits = layout.qubits();
  qubits[pair.first].position.z() = -separation / 2.0;
  qubits[pair.second].position.z() = separation / 2.0;
  return layout.with_qubits(std::move(qubits));
}

SweepTable distance_sweep(const ExperimentSetup& setup, double d_min, double d_max,
                          std::size_t points, std::size_t threads) {
  if (!(d_min >= 0.0 && d_max > d_min)) {
    throw std::invalid_argument("distance_sweep: need 0 <= d_min < d_max");
  }
  if (points < 2) throw std::invalid_argument("distance_sweep: points must be >= 2");
  setup.layout.check_pair(setup.pair);

  SweepTable table;
  table.rows.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    table.rows[k].separation =
        k + 1 == points ? d_max
                        : d_min + (d_max - d_min) * static_cast<double>(k) /
                                      static_cast<double>(points - 1);
  }

  auto evaluate = [&](std::size_t k) {
    SweepRow& row = table.rows[k];
    try {
      const SystemLayout layout = place_pair(setup.layout, setup.pair, row.separation);
      const auto& q = layout.qubits();
      row.j_eff = pair_exchange_coupling(layout, setup.pair, setup.gate.convention);
      row.j_ij = j_ij(q[setup.pair.first], q[setup.pair.second], layout);
      const GateReport iswap = run_iswap_gate(layout, setup.pair, setup.evolution, setup.gate);
      const GateReport cz = run_cz_gate(layout, setup.pair, setup.evolution, setup.gate);
      row.gate_time = iswap.duration;
      row.fidelity_iswap = iswap.fidelity_after_local_z;
      row.fidelity_cz = cz.fidelity_after_local_z;
      row.leakage = std::max(iswap.leakage, cz.leakage);
    } catch (const std::exception& e) {
      row.j_eff = row.j_ij = row.gate_time = kNaN;
      row.fidelity_iswap = row.fidelity_cz = row.leakage = kNaN;
      row.error = e.what();
    }
  };

  std::size_t workers = threads ? threads : std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, points);
  if (workers <= 1) {
    for (std::size_t k = 0; k < points; ++k) evaluate(k);
    return table;
  }
  // Rows are disjoint slots in a pre-sized table, so workers share nothing mutable.
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < points; k = next++) evaluate(k);
    });
  }
  pool.clear();
  return table;
}

Trajectory<StateVector> exchange_experiment(const ExperimentSetup& setup, double t_max,
                                            std::size_t points) {
  const auto& layout = setup.layout;
  const double amp = layout.metasurface().envelope.amplitude;
  const double j = pair_exchange_coupling(layout, setup.pair, setup.gate.convention) * amp * amp;
  const double delta = layout.inter_qubit_detuning(setup.pair) / 2.0;
  return exchange_population_series(layout, setup.pair, j, delta, t_max, points, setup.evolution);
}

void write_exchange_csv(const Trajectory<StateVector>& traj, std::ostream& os) {
  os << kExchangeHeader << '\n';
  const auto& obs = traj.observables;
  const auto& p01e = obs.at("p01_eff");
  const auto& p10e = obs.at("p10_eff");
  const auto& p01f = obs.at("p01_full");
  const auto& p10f = obs.at("p10_full");
  const auto& leak = obs.at("leakage");
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << format_double(traj.times[k]) << ',' << format_double(p01e[k]) << ','
       << format_double(p10e[k]) << ',' << format_double(p01f[k]) << ','
       << format_double(p10f[k]) << ',' << format_double(leak[k]) << '\n';
  }
}

Trajectory<StateVector> exchange_experiment(const ExperimentSetup& setup, double t_max,
                                            std::size_t points,
                                            const std::filesystem::path& path) {
  auto traj = exchange_experiment(setup, t_max, points);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_exchange_csv(traj, os);
  os.flush();
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
  return traj;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

void ValidationReport::write(std::ostream& os) const {
  for (const auto& c : checks) {
    os << std::left << std::setw(34) << c.name << ' ' << (c.pass ? "PASS" : "FAIL") << "  value="
       << format_double(c.value) << "  bound" << c.bound;
    if (!c.note.empty()) os << "  # " << c.note;
    os << '\n';
  }
  os << std::left << std::setw(34) << "overall" << ' ' << (passed() ? "PASS" : "FAIL") << '\n';
}

double numeric_conditional_phase(double lam_i, double lam_j, double eps, double tau,
                                 std::size_t levels, const EvolutionSettings& settings) {
  if (tau == 0.0) return 0.0;
  const HilbertOrdering ord(2, {levels});
  const Operator b = embed_annihilator(0, ord);
  const Operator quad = b + b.adjoint();
  const Operator h = b.adjoint() * b * eps + embed_pauli(Pauli::Z, 0, ord) * quad * lam_i +
                     embed_pauli(Pauli::Z, 1, ord) * quad * lam_j;
  const Operator u = propagate_unitary([&h](double) { return h; }, 0.0, tau, settings);
  const Matrix& m = u.matrix();
  auto at = [&](std::size_t a, std::size_t c) {
    const std::array<std::size_t, 3> lv{a, c, 0};
    const auto k = static_cast<Eigen::Index>(ord.flat_index(lv));
    return std::arg(m(k, k));
  };
  return wrap_pi(at(0, 0) + at(1, 1) - at(0, 1) - at(1, 0));
}

ValidationReport validate(const ExperimentSetup& setup) {
  ValidationReport report;
  const auto& layout = setup.layout;
  const QubitPair pair = setup.pair;
  EvolutionSettings evo = setup.evolution;
  evo.truncation_check = true;

  // Gate runs first; several checks reuse them.
  std::optional<GateReport> iswap, cz, snapped;
  std::string iswap_err, cz_err, snapped_err;
  try {
    iswap = run_iswap_gate(layout, pair, evo, setup.gate);
  } catch (const std::exception& e) {
    iswap_err = e.what();
  }
  try {
    cz = run_cz_gate(layout, pair, evo, setup.gate);
  } catch (const std::exception& e) {
    cz_err = e.what();
  }
  try {
    GateOptions o = setup.gate;
    o.snap_closed_loop = true;
    o.dissipation = false;
    snapped = run_cz_gate(layout, pair, evo, o);
  } catch (const std::exception& e) {
    snapped_err = e.what();
  }

  // Hermiticity of every generated Hamiltonian.
  try {
    double worst = 0.0;
    ModulationEnvelope env = layout.metasurface().envelope;
    env.duration = iswap ? iswap.value().duration : env.duration;
    const SystemLayout full = sideband_expanded(layout.with_envelope(env));
    for (double frac : {0.1, 0.5, 0.9}) {
      worst = std::max(worst, interaction_hamiltonian(full, frac * env.duration).hermiticity_defect());
      worst = std::max(worst, corotating_hamiltonian(full, frac * env.duration).hermiticity_defect());
    }
    worst = std::max(worst, corotating_frame_generator(full).hermiticity_defect());
    const HilbertOrdering two(2, {});
    worst = std::max(worst, iswap_hamiltonian(pair_exchange_coupling(layout, pair, setup.gate.convention),
                                              layout.inter_qubit_detuning(pair) / 2.0, two)
                                .hermiticity_defect());
    bool dressed = true;
    for (const auto& q : layout.qubits()) dressed = dressed && q.drive_detuning != 0.0;
    if (dressed) {
      worst = std::max(worst, dressed_hamiltonian(full).hermiticity_defect());
      worst = std::max(worst, dispersive_operator(full, 1.0).hermiticity_defect());
      const auto src = geometric_phase_hamiltonian_source(full, true);
      worst = std::max(worst, src(0.5 * env.duration).hermiticity_defect());
    }
    report.checks.push_back(check_le("hamiltonian_hermiticity", worst, kHermitianTolerance));
  } catch (const std::exception& e) {
    report.checks.push_back(failed("hamiltonian_hermiticity", "<=1e-12", e));
  }

  // Unitarity of the closed-system gate propagators.
  try {
    double worst = 0.0;
    if (!iswap) throw std::runtime_error("iswap gate failed: " + iswap_err);
    ModulationEnvelope env = layout.metasurface().envelope;
    env.duration = iswap->duration;
    const SystemLayout full = sideband_expanded(layout.with_envelope(env));
    worst = std::max(worst, propagate_unitary(corotating_hamiltonian_source(full), 0.0,
                                              env.duration, evo)
                                .unitarity_defect());
    if (cz) {
      env.duration = cz->duration;
      env.amplitude = cz->envelope_amplitude;
      const SystemLayout dressed = sideband_expanded(layout.with_envelope(env));
      worst = std::max(worst, propagate_unitary(geometric_phase_hamiltonian_source(dressed, true),
                                                0.0, env.duration, evo)
                                  .unitarity_defect());
    }
    report.checks.push_back(check_le("propagator_unitarity", worst, kUnitaryTolerance));
  } catch (const std::exception& e) {
    report.checks.push_back(failed("propagator_unitarity", "<=1e-09", e));
  }

  // Lindblad trace drift and positivity along the iSWAP evolution.
  try {
    if (!iswap) throw std::runtime_error("iswap gate failed: " + iswap_err);
    ModulationEnvelope env = layout.metasurface().envelope;
    env.duration = iswap->duration;
    const SystemLayout full = sideband_expanded(layout.with_envelope(env));
    const auto dim = static_cast<Eigen::Index>(full.ordering().dimension());
    Vector psi = Vector::Zero(dim);
    psi(static_cast<Eigen::Index>(computational_index(full, pair, 0, 1))) = std::sqrt(0.5);
    psi(static_cast<Eigen::Index>(computational_index(full, pair, 1, 1))) = std::sqrt(0.5);
    std::vector<double> times;
    for (int k = 0; k <= 4; ++k) times.push_back(env.duration * k / 4.0);
    const auto traj = evolve_lindblad(DensityMatrix::pure(StateVector(psi)),
                                      corotating_hamiltonian_source(full),
                                      collapse_operators(full), times, evo);
    double drift = 0.0, min_eig = 1.0;
    for (double t : traj.observables.at("trace")) drift = std::max(drift, std::abs(t - 1.0));
    for (double m : traj.observables.at("min_eigenvalue")) min_eig = std::min(min_eig, m);
    report.checks.push_back(check_le("lindblad_trace_drift", drift, 1e-8));
    report.checks.push_back(check_ge("lindblad_min_eigenvalue", min_eig, -1e-6));
  } catch (const std::exception& e) {
    report.checks.push_back(failed("lindblad_trace_drift", "<=1e-08", e));
  }

  // Populations must not move when every mode gets two more Fock levels.
  try {
    double worst = 0.0;
    if (!iswap) throw std::runtime_error("iswap gate failed: " + iswap_err);
    worst = std::max(worst, iswap->truncation_deviation.value_or(0.0));
    if (!cz) throw std::runtime_error("cz gate failed: " + cz_err);
    worst = std::max(worst, cz->truncation_deviation.value_or(0.0));
    report.checks.push_back(check_lt("truncation_convergence", worst, 1e-6,
                                     "N -> N+2, gate populations"));
  } catch (const std::exception& e) {
    report.checks.push_back(failed("truncation_convergence", "<1e-06", e));
  }

  // Full-vs-effective deviation shrinks at least 2x when g/|ε| halves at fixed Jt.
  try {
    double dev[2] = {0.0, 0.0};
    for (int k = 0; k < 2; ++k) {
      ExperimentSetup s = setup;
      s.layout = with_coupling_ratio(layout, pair, k == 0 ? 0.1 : 0.05);
      const double amp = s.layout.metasurface().envelope.amplitude;
      const double j = pair_exchange_coupling(s.layout, pair, CouplingConvention{}) * amp * amp;
      const double t_max = kPi / std::abs(j);
      const auto traj = exchange_population_series(s.layout, pair, j,
                                                   s.layout.inter_qubit_detuning(pair) / 2.0,
                                                   t_max, 201, s.evolution);
      const auto& a = traj.observables.at("p10_full");
      const auto& b = traj.observables.at("p10_eff");
      for (std::size_t n = 0; n < a.size(); ++n) dev[k] = std::max(dev[k], std::abs(a[n] - b[n]));
    }
    report.checks.push_back(check_ge("effective_vs_full_scaling", dev[0] / dev[1], 2.0,
                                     "deviation ratio g/eps 0.1 vs 0.05, dev(0.1)=" + sci(dev[0])));
  } catch (const std::exception& e) {
    report.checks.push_back(failed("effective_vs_full_scaling", ">=2", e));
  }

  // Closed-form conditional phase against the four-configuration propagation.
  try {
    std::mt19937_64 rng(20260315);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    EvolutionSettings fine = evo;
    fine.tolerance = 1e-10;
    for (int n = 0; n < 100; ++n) {
      const double eps = (unit(rng) < 0.5 ? -1.0 : 1.0) * 2.0 * kPi * 200e6 * (0.5 + unit(rng));
      const double li = 0.2 * std::abs(eps) * unit(rng);
      const double lj = 0.2 * std::abs(eps) * unit(rng);
      const double tau = 6.0 * 2.0 * kPi / std::abs(eps) * unit(rng);
      const double numeric = numeric_conditional_phase(li, lj, eps, tau, 20, fine);
      const double closed = conditional_phase_closed_form(li, lj, eps, tau);
      worst = std::max(worst, std::abs(wrap_pi(numeric - closed)));
    }
    report.checks.push_back(check_le("conditional_phase_oracle", worst, 1e-5, "100 random sets, N=20"));
  } catch (const std::exception& e) {
    report.checks.push_back(failed("conditional_phase_oracle", "<=1e-05", e));
  }

  // The two forms of the interaction-time estimate.
  try {
    const std::size_t m = dominant_mode(layout);
    const auto& ms = layout.metasurface();
    const auto& qi = layout.qubits()[pair.first];
    const auto& qj = layout.qubits()[pair.second];
    const auto& mode = ms.modes.at(m);
    const double t_abs =
        std::sqrt(std::abs(transmission_at(ms.transmission, mode.wavevector, qi.position)) *
                  std::abs(transmission_at(ms.transmission, mode.wavevector, qj.position)));
    const double via_g =
        interaction_time_estimate(qi.bare_coupling, qj.bare_coupling, t_abs, ms.mode_detuning(m));
    const SystemLayout single = layout.with_modes({mode});
    const double via_j = interaction_time_from_coupling(j_ij(qi, qj, single));
    report.checks.push_back(check_le("interaction_time_forms", std::abs(via_g - via_j) / via_j, 0.01,
                                     "t=" + sci(via_g) + " s"));
  } catch (const std::exception& e) {
    report.checks.push_back(failed("interaction_time_forms", "<=0.01", e));
  }

  // Closed-loop suppression with snapping and no dissipation.
  if (snapped) {
    report.checks.push_back(
        check_le("closed_loop_residual", snapped->residual_mode_excitation, 1e-4,
                 "n=" + std::to_string(snapped->closed_loop_n.value_or(0))));
    report.checks.push_back(check_le("closed_loop_conditional_phase",
                                     std::abs(snapped->conditional_phase.value_or(kNaN) - kPi), 1e-3,
                                     "|phi - pi|"));
  } else {
    report.checks.push_back({"closed_loop_residual", false, kNaN, "<=0.0001", snapped_err});
  }

  // Headline fidelities.
  if (iswap) {
    report.checks.push_back(check_ge("iswap_fidelity_after_local_z", iswap->fidelity_after_local_z,
                                     0.98));
  } else {
    report.checks.push_back({"iswap_fidelity_after_local_z", false, kNaN, ">=0.98", iswap_err});
  }
  if (cz) {
    report.checks.push_back(check_ge("cz_fidelity_after_local_z", cz->fidelity_after_local_z, 0.98));
  } else {
    report.checks.push_back({"cz_fidelity_after_local_z", false, kNaN, ">=0.98", cz_err});
  }
  return report;
}

}  // namespace metagate
