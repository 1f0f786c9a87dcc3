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

#include "metagate/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

namespace metagate {

namespace {

HilbertOrdering make_ordering(const std::vector<QubitSpec>& qubits, const MetasurfaceConfig& ms) {
  std::vector<std::size_t> truncations;
  truncations.reserve(ms.modes.size());
  for (const auto& m : ms.modes) truncations.push_back(m.truncation);
  return HilbertOrdering(qubits.size(), std::move(truncations));
}

// Embedded ladder and Pauli operators, built once per layout.
struct LayoutOperators {
  std::vector<Operator> sigma_plus;
  std::vector<Operator> sigma_z;
  std::vector<Operator> excitation;  // σ+σ−
  std::vector<Operator> b;
  std::vector<Operator> number;

  explicit LayoutOperators(const HilbertOrdering& ord) {
    for (std::size_t i = 0; i < ord.qubit_count(); ++i) {
      sigma_plus.push_back(embed_pauli(Pauli::Plus, i, ord));
      sigma_z.push_back(embed_pauli(Pauli::Z, i, ord));
      excitation.push_back(sigma_plus.back() * sigma_plus.back().adjoint());
    }
    for (std::size_t m = 0; m < ord.mode_count(); ++m) {
      b.push_back(embed_annihilator(m, ord));
      number.push_back(b.back().adjoint() * b.back());
    }
  }
};

// g σ+ b + g* σ− b†.
Operator exchange_term(const Operator& sigma_plus, const Operator& b, cplx g) {
  const Operator term = sigma_plus * b;
  return term * g + term.adjoint() * std::conj(g);
}

double sin_theta(const QubitSpec& q) {
  const DressingAngle d = dressing_angle(q);
  if (d.singular) {
    throw std::domain_error("qubit " + std::to_string(q.index) +
                            ": resonant drive (drive detuning 0) makes the dressed basis singular");
  }
  return std::sin(d.theta);
}

}  // namespace

SystemLayout::SystemLayout(std::vector<QubitSpec> qubits, MetasurfaceConfig metasurface,
                           std::size_t dimension_cap)
    : qubits_(std::move(qubits)),
      metasurface_(std::move(metasurface)),
      dimension_cap_(dimension_cap),
      ordering_(make_ordering(qubits_, metasurface_)) {
  std::set<int> seen;
  for (const auto& q : qubits_) {
    if (!seen.insert(q.index).second) {
      throw std::invalid_argument("layout: duplicate qubit index " + std::to_string(q.index));
    }
    if (q.bare_coupling < 0.0) throw std::invalid_argument("layout: negative bare coupling");
    if (!(q.t1 > 0.0)) throw std::invalid_argument("layout: t1 must be positive");
  }
  validate(metasurface_);
  if (ordering_.dimension() > dimension_cap_) {
    throw std::invalid_argument("layout: Hilbert dimension " +
                                std::to_string(ordering_.dimension()) + " exceeds cap " +
                                std::to_string(dimension_cap_));
  }
}

void SystemLayout::check_pair(QubitPair pair) const {
  if (pair.first >= qubits_.size() || pair.second >= qubits_.size() ||
      pair.first == pair.second) {
    throw std::invalid_argument("layout: invalid qubit pair (" + std::to_string(pair.first) + ", " +
                                std::to_string(pair.second) + ")");
  }
}

double SystemLayout::inter_qubit_detuning(QubitPair pair) const {
  check_pair(pair);
  return qubits_[pair.first].frequency - qubits_[pair.second].frequency;
}

SystemLayout SystemLayout::with_envelope(const ModulationEnvelope& envelope) const {
  MetasurfaceConfig ms = metasurface_;
  ms.envelope = envelope;
  return SystemLayout(qubits_, std::move(ms), dimension_cap_);
}

SystemLayout SystemLayout::with_qubits(std::vector<QubitSpec> qubits) const {
  return SystemLayout(std::move(qubits), metasurface_, dimension_cap_);
}

SystemLayout SystemLayout::with_modes(std::vector<ModeSpec> modes) const {
  MetasurfaceConfig ms = metasurface_;
  ms.modes = std::move(modes);
  return SystemLayout(qubits_, std::move(ms), dimension_cap_);
}

SystemLayout SystemLayout::with_extra_levels(std::size_t extra) const {
  std::vector<ModeSpec> modes = metasurface_.modes;
  for (auto& m : modes) m.truncation += extra;
  std::size_t dim = std::size_t{1} << qubits_.size();
  for (const auto& m : modes) dim *= m.truncation;
  MetasurfaceConfig ms = metasurface_;
  ms.modes = std::move(modes);
  return SystemLayout(qubits_, std::move(ms), std::max(dimension_cap_, dim));
}

SystemLayout sideband_expanded(const SystemLayout& layout) {
  const double k_m = layout.metasurface().envelope.k_m;
  if (k_m == 0.0) return layout;
  std::vector<ModeSpec> modes;
  int next_index = 0;
  for (const auto& m : layout.metasurface().modes) {
    for (double sign : {1.0, -1.0}) {
      ModeSpec s = m;
      s.index = next_index++;
      s.wavevector.z() += sign * k_m;
      s.coupling_scale = m.coupling_scale / std::numbers::sqrt2;
      modes.push_back(s);
    }
  }
  std::size_t dim = std::size_t{1} << layout.qubits().size();
  for (const auto& m : modes) dim *= m.truncation;
  MetasurfaceConfig ms = layout.metasurface();
  ms.modes = std::move(modes);
  return SystemLayout(layout.qubits(), std::move(ms), std::max(layout.dimension_cap(), dim));
}

HamiltonianSource interaction_hamiltonian_source(const SystemLayout& layout) {
  const LayoutOperators ops(layout.ordering());
  const auto& ms = layout.metasurface();
  Operator base = Operator::zero(layout.ordering().dimension());
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    base += ops.number[m] * ms.mode_detuning(m);
  }
  struct Channel {
    Operator raise;  // σ+_i b_μ
    cplx g;          // static coupling
    double detuning;  // ω_i − ν_μ
  };
  std::vector<Channel> channels;
  for (std::size_t i = 0; i < layout.qubits().size(); ++i) {
    const auto& q = layout.qubits()[i];
    for (std::size_t m = 0; m < ms.modes.size(); ++m) {
      channels.push_back({ops.sigma_plus[i] * ops.b[m], static_coupling(q, ms.modes[m], ms),
                          q.frequency - ms.modes[m].frequency});
    }
  }
  const ModulationEnvelope envelope = ms.envelope;
  return [envelope, base, channels = std::move(channels)](double t) {
    const double e = envelope.value_at(t);
    Operator h = base;
    if (e == 0.0) return h;
    for (const auto& c : channels) {
      const cplx g = c.g * e * std::exp(kI * (c.detuning * t));
      h += c.raise * g + c.raise.adjoint() * std::conj(g);
    }
    return h;
  };
}

Operator interaction_hamiltonian(const SystemLayout& layout, double t) {
  return interaction_hamiltonian_source(layout)(t);
}

HamiltonianSource corotating_hamiltonian_source(const SystemLayout& layout) {
  const LayoutOperators ops(layout.ordering());
  const auto& ms = layout.metasurface();
  Operator base = Operator::zero(layout.ordering().dimension());
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    base += ops.number[m] * (2.0 * ms.mode_detuning(m));
  }
  for (std::size_t i = 0; i < layout.qubits().size(); ++i) {
    base += ops.excitation[i] * (layout.qubits()[i].frequency - ms.drive_reference);
  }
  // Coupling operator at unit envelope.
  Operator coupling = Operator::zero(layout.ordering().dimension());
  for (std::size_t i = 0; i < layout.qubits().size(); ++i) {
    for (std::size_t m = 0; m < ms.modes.size(); ++m) {
      const cplx g = static_coupling(layout.qubits()[i], ms.modes[m], ms);
      coupling += exchange_term(ops.sigma_plus[i], ops.b[m], g);
    }
  }
  const ModulationEnvelope envelope = ms.envelope;
  return [envelope, base, coupling](double t) {
    const double e = envelope.value_at(t);
    if (e == 0.0) return base;
    return base + coupling * e;
  };
}

Operator corotating_hamiltonian(const SystemLayout& layout, double t) {
  return corotating_hamiltonian_source(layout)(t);
}

Operator corotating_frame_generator(const SystemLayout& layout) {
  const LayoutOperators ops(layout.ordering());
  const auto& ms = layout.metasurface();
  Operator gen = Operator::zero(layout.ordering().dimension());
  for (std::size_t i = 0; i < layout.qubits().size(); ++i) {
    gen += ops.excitation[i] * (ms.drive_reference - layout.qubits()[i].frequency);
  }
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    gen -= ops.number[m] * ms.mode_detuning(m);
  }
  return gen;
}

LambdaCoefficients lambda_coefficients(const SystemLayout& layout, double envelope_value) {
  const auto& ms = layout.metasurface();
  const auto nq = static_cast<Eigen::Index>(layout.qubits().size());
  const auto nm = static_cast<Eigen::Index>(ms.modes.size());
  LambdaCoefficients out{Eigen::MatrixXd::Zero(nq, nm), Eigen::MatrixXd::Zero(nq, nm)};
  for (Eigen::Index i = 0; i < nq; ++i) {
    const auto& q = layout.qubits()[static_cast<std::size_t>(i)];
    const double s = sin_theta(q);
    for (Eigen::Index m = 0; m < nm; ++m) {
      const cplx g = static_coupling(q, ms.modes[static_cast<std::size_t>(m)], ms) * envelope_value;
      out.lambda(i, m) = std::abs(g) * std::abs(s) / 2.0;
      out.phase(i, m) = std::arg(g) + (s < 0.0 ? std::numbers::pi : 0.0);
    }
  }
  return out;
}

Operator dressed_hamiltonian(const SystemLayout& layout) {
  return dressed_hamiltonian(layout, layout.metasurface().envelope.amplitude);
}

Operator dressed_hamiltonian(const SystemLayout& layout, double envelope_value) {
  const LayoutOperators ops(layout.ordering());
  const auto& ms = layout.metasurface();
  const LambdaCoefficients lc = lambda_coefficients(layout, envelope_value);
  Operator h = Operator::zero(layout.ordering().dimension());
  for (std::size_t m = 0; m < ms.modes.size(); ++m) h += ops.number[m] * ms.mode_detuning(m);
  for (std::size_t i = 0; i < layout.qubits().size(); ++i) {
    for (std::size_t m = 0; m < ms.modes.size(); ++m) {
      const auto ii = static_cast<Eigen::Index>(i), mm = static_cast<Eigen::Index>(m);
      const double lam = lc.lambda(ii, mm);
      if (lam == 0.0) continue;
      // Quadrature rotated so the coupling stays Hermitian for complex g.
      const cplx rot = std::exp(kI * lc.phase(ii, mm));
      const Operator quad = ops.b[m] * rot + ops.b[m].adjoint() * std::conj(rot);
      h += ops.sigma_z[i] * quad * lam;
    }
  }
  return h;
}

Eigen::MatrixXd dispersive_shifts(const SystemLayout& layout) {
  return dispersive_shifts(layout, layout.metasurface().envelope.amplitude);
}

Eigen::MatrixXd dispersive_shifts(const SystemLayout& layout, double envelope_value) {
  const auto& ms = layout.metasurface();
  const auto nq = static_cast<Eigen::Index>(layout.qubits().size());
  const auto nm = static_cast<Eigen::Index>(ms.modes.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(nq, nm);
  for (Eigen::Index i = 0; i < nq; ++i) {
    const auto& q = layout.qubits()[static_cast<std::size_t>(i)];
    if (q.drive_detuning == 0.0) {
      throw std::domain_error("dispersive_shifts: qubit " + std::to_string(q.index) +
                              " has zero drive detuning");
    }
    for (Eigen::Index m = 0; m < nm; ++m) {
      const cplx g = static_coupling(q, ms.modes[static_cast<std::size_t>(m)], ms) * envelope_value;
      f(i, m) = std::norm(g) / q.drive_detuning;
    }
  }
  return f;
}

Operator dispersive_operator(const SystemLayout& layout, double envelope_value) {
  const LayoutOperators ops(layout.ordering());
  const Eigen::MatrixXd f = dispersive_shifts(layout, envelope_value);
  Operator h = Operator::zero(layout.ordering().dimension());
  for (std::size_t i = 0; i < layout.qubits().size(); ++i) {
    for (std::size_t m = 0; m < layout.metasurface().modes.size(); ++m) {
      const double fim = f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
      if (fim != 0.0) h += ops.sigma_z[i] * ops.number[m] * fim;
    }
  }
  return h;
}

HamiltonianSource geometric_phase_hamiltonian_source(const SystemLayout& layout,
                                                     bool include_dispersive) {
  // λ scales linearly and f quadratically with the envelope value, so the
  // unit-envelope pieces are assembled once.
  const Operator modes = dressed_hamiltonian(layout, 0.0);
  const Operator longitudinal = dressed_hamiltonian(layout, 1.0) - modes;
  const Operator dispersive = include_dispersive
                                  ? dispersive_operator(layout, 1.0)
                                  : Operator::zero(layout.ordering().dimension());
  const ModulationEnvelope envelope = layout.metasurface().envelope;
  return [envelope, modes, longitudinal, dispersive](double t) {
    const double e = envelope.value_at(t);
    if (e == 0.0) return modes;
    return modes + longitudinal * e + dispersive * (e * e);
  };
}

std::string_view to_string(CouplingConvention::Variant v) {
  return v == CouplingConvention::Variant::Literal ? "literal" : "dispersive_normalized";
}

double j_eff(const QubitSpec& q1, const QubitSpec& q2, const ModeSpec& mode,
             const MetasurfaceConfig& cfg, CouplingConvention conv) {
  const double eps = mode.frequency - cfg.drive_reference;
  double norm = 0.0;
  if (conv.variant == CouplingConvention::Variant::DispersiveNormalized) {
    if (eps == 0.0) throw std::domain_error("j_eff: zero mode detuning");
    norm = std::abs(eps);
  } else {
    norm = conv.normalization_frequency > 0.0 ? conv.normalization_frequency : std::abs(eps);
    if (norm == 0.0) throw std::domain_error("j_eff: zero normalization frequency");
  }
  const double mag = std::abs(static_coupling(q1, mode, cfg)) * std::abs(static_coupling(q2, mode, cfg));
  const double phase = cfg.envelope.k_m * (q1.position.z() - q2.position.z());
  return mag * std::cos(phase) / (2.0 * norm);
}

double pair_exchange_coupling(const SystemLayout& layout, QubitPair pair, CouplingConvention conv) {
  layout.check_pair(pair);
  const auto& ms = layout.metasurface();
  double j = 0.0;
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    const double sign = ms.mode_detuning(m) < 0.0 ? -1.0 : 1.0;
    j += sign * j_eff(layout.qubits()[pair.first], layout.qubits()[pair.second], ms.modes[m], ms, conv);
  }
  return j;
}

double j_ij(const QubitSpec& qi, const QubitSpec& qj, const SystemLayout& layout) {
  const auto& ms = layout.metasurface();
  double total = 0.0;
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    const double eps = ms.mode_detuning(m);
    if (eps == 0.0) throw std::domain_error("j_ij: zero mode detuning");
    total += std::abs(static_coupling(qi, ms.modes[m], ms) * static_coupling(qj, ms.modes[m], ms)) /
             (4.0 * std::abs(eps));
  }
  return total;
}

Operator iswap_hamiltonian(double j, double delta, const HilbertOrdering& ordering) {
  if (ordering.qubit_count() < 2) throw std::invalid_argument("iswap_hamiltonian: need two qubits");
  const HilbertOrdering pair(2, {});
  const Operator xx = embed_pauli(Pauli::X, 0, pair) * embed_pauli(Pauli::X, 1, pair);
  const Operator yy = embed_pauli(Pauli::Y, 0, pair) * embed_pauli(Pauli::Y, 1, pair);
  const Operator zdiff = embed_pauli(Pauli::Z, 0, pair) - embed_pauli(Pauli::Z, 1, pair);
  return (xx + yy) * (j / 2.0) - zdiff * (delta / 2.0);
}

Operator effective_exchange(double j, const HilbertOrdering& ordering) {
  return iswap_hamiltonian(j, 0.0, ordering);
}

}  // namespace metagate
