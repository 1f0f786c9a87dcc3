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

#include "metagate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/SparseCore>

namespace metagate {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTraceDriftBound = 1e-8;

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

std::size_t initial_steps(double span, double dt) {
  const double n = std::ceil(span / dt - 1e-9);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

// exp(-i H dt) with the eigendecomposition of the last distinct H reused.
class StepExponential {
 public:
  const Matrix& get(const Operator& h, double dt) {
    if (!eig_ || !(h.matrix() == h_)) {
      h_ = h.matrix();
      eig_ = h.max_abs() == 0.0 ? std::nullopt : std::optional<HermitianEigen>(eigh(h));
      zero_ = !eig_.has_value();
      dt_ = std::nan("");
    }
    if (!(dt == dt_)) {
      dt_ = dt;
      const auto n = h_.rows();
      if (zero_) {
        u_ = Matrix::Identity(n, n);
      } else {
        Vector phases(eig_->values.size());
        for (Eigen::Index k = 0; k < phases.size(); ++k) {
          phases(k) = std::exp(-kI * (eig_->values(k) * dt));
        }
        u_ = eig_->vectors * phases.asDiagonal() * eig_->vectors.adjoint();
      }
    }
    return u_;
  }

 private:
  Matrix h_;
  std::optional<HermitianEigen> eig_;
  bool zero_ = false;
  double dt_ = std::nan("");
  Matrix u_;
};

Matrix midpoint_product(const HamiltonianSource& h, double t0, double t1, std::size_t n,
                        StepExponential& cache) {
  const double dt = (t1 - t0) / static_cast<double>(n);
  Matrix u;
  for (std::size_t k = 0; k < n; ++k) {
    const double tm = t0 + (static_cast<double>(k) + 0.5) * dt;
    const Matrix& step = cache.get(h(tm), dt);
    u = k == 0 ? step : Matrix(step * u);
  }
  return u;
}

// Jump operators here (σ⁻, b) are very sparse and Σ γ L†L is usually
// diagonal, so both are stored in the cheapest exact form.
struct Dissipator {
  using Sparse = Eigen::SparseMatrix<cplx>;
  std::vector<Sparse> jump;      // √γ L
  std::vector<Sparse> jump_dag;  // √γ L†
  Matrix k;                      // Σ γ L†L
  Vector k_diag;
  bool k_is_diagonal = true;

  explicit Dissipator(const std::vector<CollapseOperator>& ops, std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    k = Matrix::Zero(n, n);
    for (const auto& c : ops) {
      if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) {
        throw std::invalid_argument("collapse operator rate must be finite and >= 0");
      }
      if (c.op.dim() != dim) throw std::invalid_argument("collapse operator dimension mismatch");
      if (c.rate == 0.0) continue;
      const Matrix l = c.op.matrix() * std::sqrt(c.rate);
      jump.push_back(l.sparseView());
      jump_dag.push_back(Matrix(l.adjoint()).sparseView());
      k += l.adjoint() * l;
    }
    k_diag = k.diagonal();
    k_is_diagonal = (k - Matrix(k_diag.asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  }

  bool empty() const { return jump.empty(); }

  Matrix apply(const Matrix& rho) const {
    Matrix out = k_is_diagonal ? Matrix(-0.5 * (k_diag.asDiagonal() * rho + rho * k_diag.asDiagonal()))
                               : Matrix(-0.5 * (k * rho + rho * k));
    for (std::size_t i = 0; i < jump.size(); ++i) {
      const Matrix left = jump[i] * rho;
      out += (jump_dag[i].transpose() * left.transpose()).transpose();
    }
    return out;
  }
};

// Integrating-factor RK4 over [t0, t1] in n equal steps, applied to every state.
void lawson_rk4(std::vector<Matrix>& states, const HamiltonianSource& h, const Dissipator& d,
                double t0, double t1, std::size_t n, StepExponential& cache) {
  const double dt = (t1 - t0) / static_cast<double>(n);
  for (std::size_t step = 0; step < n; ++step) {
    const double tm = t0 + (static_cast<double>(step) + 0.5) * dt;
    const Matrix& uh = cache.get(h(tm), 0.5 * dt);
    const Matrix uh_dag = uh.adjoint();
    auto e = [&](const Matrix& x) -> Matrix { return uh * x * uh_dag; };
    for (auto& y : states) {
      const Matrix ey = e(y);
      if (d.empty()) {
        y = e(ey);
        continue;
      }
      const Matrix k1 = d.apply(y);
      const Matrix k2 = d.apply(e(y + (0.5 * dt) * k1));
      const Matrix k3 = d.apply(ey + (0.5 * dt) * k2);
      const Matrix eey = e(ey);
      const Matrix k4 = d.apply(eey + dt * e(k3));
      y = eey + (dt / 6.0) * (e(e(k1) + 2.0 * k2 + 2.0 * k3) + k4);
    }
  }
}

std::size_t swap_pair_bits(std::size_t idx) { return ((idx & 1U) << 1U) | ((idx >> 1U) & 1U); }

void check_fidelity_inputs(const Operator& ideal) {
  if (ideal.dim() != 4) throw std::invalid_argument("fidelity: ideal gate must be 4x4");
  if (ideal.unitarity_defect() > kUnitaryTolerance) {
    throw std::invalid_argument("fidelity: ideal gate is not unitary");
  }
}

std::array<cplx, 4> z_phases(double phi1, double phi2) {
  return {cplx(1.0), std::exp(kI * phi2), std::exp(kI * phi1), std::exp(kI * (phi1 + phi2))};
}

// Grid plus pattern search over (φ1, φ2) for a smooth objective.
template <class F>
LocalZFit maximise_local_z(F&& objective) {
  constexpr int kGrid = 64;
  const double step0 = kTwoPi / kGrid;
  LocalZFit best{objective(0.0, 0.0), 0.0, 0.0};
  for (int a = 0; a < kGrid; ++a) {
    for (int b = 0; b < kGrid; ++b) {
      const double p1 = a * step0, p2 = b * step0;
      const double f = objective(p1, p2);
      if (f > best.fidelity) best = {f, p1, p2};
    }
  }
  for (double step = step0 / 2.0; step > 1e-12;) {
    bool moved = false;
    const double cand[4][2] = {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
    for (const auto& c : cand) {
      const double p1 = best.phi1 + c[0], p2 = best.phi2 + c[1];
      const double f = objective(p1, p2);
      if (f > best.fidelity) {
        best = {f, p1, p2};
        moved = true;
      }
    }
    if (!moved) step /= 2.0;
  }
  best.phi1 = std::fmod(std::fmod(best.phi1, kTwoPi) + kTwoPi, kTwoPi);
  best.phi2 = std::fmod(std::fmod(best.phi2, kTwoPi) + kTwoPi, kTwoPi);
  return best;
}

}  // namespace

void validate(const EvolutionSettings& s) {
  if (!(s.dt_initial > 0.0)) throw std::invalid_argument("evolution: dt_initial must be > 0");
  if (!(s.tolerance > 0.0)) throw std::invalid_argument("evolution: tolerance must be > 0");
  if (s.max_step_halvings < 0) throw std::invalid_argument("evolution: max_step_halvings < 0");
}

Operator propagate_unitary(const HamiltonianSource& h, double t0, double t1,
                           const EvolutionSettings& settings) {
  validate(settings);
  if (!(t1 > t0)) throw std::invalid_argument("propagate_unitary: requires t1 > t0");
  StepExponential cache;
  std::size_t n = initial_steps(t1 - t0, settings.dt_initial);
  Matrix prev = midpoint_product(h, t0, t1, n, cache);
  double change = 0.0;
  for (int halving = 0; halving < settings.max_step_halvings; ++halving) {
    n *= 2;
    Matrix cur = midpoint_product(h, t0, t1, n, cache);
    change = max_abs_diff(cur, prev);
    if (change <= settings.tolerance) {
      Operator u(std::move(cur));
      const double defect = u.unitarity_defect();
      if (defect > kUnitaryTolerance) {
        throw ConvergenceError("propagate_unitary: result not unitary (defect " +
                               std::to_string(defect) + ")");
      }
      return u;
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("propagate_unitary: no convergence after " +
                         std::to_string(settings.max_step_halvings) + " halvings (last change " +
                         std::to_string(change) + ")");
}

std::vector<CollapseOperator> collapse_operators(const SystemLayout& layout) {
  std::vector<CollapseOperator> out;
  const auto& ord = layout.ordering();
  for (std::size_t i = 0; i < layout.qubits().size(); ++i) {
    const double t1 = layout.qubits()[i].t1;
    if (std::isfinite(t1)) out.push_back({embed_pauli(Pauli::Minus, i, ord), 1.0 / t1});
  }
  const auto& modes = layout.metasurface().modes;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (modes[m].loss_rate > 0.0) out.push_back({embed_annihilator(m, ord), modes[m].loss_rate});
  }
  return out;
}

Trajectory<DensityMatrix> evolve_lindblad(const DensityMatrix& rho0, const HamiltonianSource& h,
                                          const std::vector<CollapseOperator>& collapse,
                                          const std::vector<double>& times,
                                          const EvolutionSettings& settings) {
  validate(settings);
  if (times.size() < 2) throw std::invalid_argument("evolve_lindblad: need at least two times");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw std::invalid_argument("evolve_lindblad: times must be strictly increasing");
    }
  }
  const Dissipator d(collapse, rho0.dim());

  auto run = [&](double dt) {
    StepExponential cache;
    std::vector<Matrix> out{rho0.matrix()};
    std::vector<Matrix> state{rho0.matrix()};
    for (std::size_t k = 1; k < times.size(); ++k) {
      lawson_rk4(state, h, d, times[k - 1], times[k], initial_steps(times[k] - times[k - 1], dt),
                 cache);
      out.push_back(state.front());
    }
    return out;
  };

  double dt = settings.dt_initial;
  std::vector<Matrix> prev = run(dt);
  std::optional<std::vector<Matrix>> accepted;
  double change = 0.0;
  for (int halving = 0; halving < settings.max_step_halvings; ++halving) {
    dt /= 2.0;
    std::vector<Matrix> cur = run(dt);
    change = max_abs_diff(cur.back(), prev.back());
    if (change <= settings.tolerance) {
      accepted = std::move(cur);
      break;
    }
    prev = std::move(cur);
  }
  if (!accepted) {
    throw ConvergenceError("evolve_lindblad: no convergence after " +
                           std::to_string(settings.max_step_halvings) + " halvings (last change " +
                           std::to_string(change) + ")");
  }

  Trajectory<DensityMatrix> traj;
  traj.times = times;
  auto& tr = traj.observables["trace"];
  auto& mineig = traj.observables["min_eigenvalue"];
  const cplx tr0 = rho0.trace();
  for (auto& m : *accepted) {
    DensityMatrix rho(std::move(m));
    const double drift = std::abs(rho.trace() - tr0);
    if (drift > kTraceDriftBound) {
      throw ConvergenceError("evolve_lindblad: trace drift " + std::to_string(drift));
    }
    tr.push_back(rho.trace().real());
    mineig.push_back(rho.min_eigenvalue());
    traj.states.push_back(std::move(rho));
  }
  return traj;
}

LindbladBatch evolve_lindblad_batch(const Matrix& probe, const std::vector<Matrix>& inputs,
                                    const HamiltonianSource& h,
                                    const std::vector<CollapseOperator>& collapse, double t0,
                                    double t1, const EvolutionSettings& settings) {
  validate(settings);
  if (!(t1 > t0)) throw std::invalid_argument("evolve_lindblad_batch: requires t1 > t0");
  const Dissipator d(collapse, static_cast<std::size_t>(probe.rows()));
  for (const auto& in : inputs) {
    if (in.rows() != probe.rows() || in.cols() != probe.cols()) {
      throw std::invalid_argument("evolve_lindblad_batch: input dimension mismatch");
    }
  }
  StepExponential cache;
  std::size_t n = initial_steps(t1 - t0, settings.dt_initial);
  std::vector<Matrix> prev{probe};
  lawson_rk4(prev, h, d, t0, t1, n, cache);
  bool converged = false;
  double change = 0.0;
  for (int halving = 0; halving < settings.max_step_halvings; ++halving) {
    n *= 2;
    std::vector<Matrix> cur{probe};
    lawson_rk4(cur, h, d, t0, t1, n, cache);
    change = max_abs_diff(cur.front(), prev.front());
    if (change <= settings.tolerance) {
      const double drift = std::abs(cur.front().trace() - probe.trace());
      if (drift > kTraceDriftBound) {
        throw ConvergenceError("evolve_lindblad_batch: trace drift " + std::to_string(drift));
      }
      converged = true;
      break;
    }
    prev = std::move(cur);
  }
  if (!converged) {
    throw ConvergenceError("evolve_lindblad_batch: no convergence (last change " +
                           std::to_string(change) + ")");
  }
  LindbladBatch out{inputs, n};
  lawson_rk4(out.finals, h, d, t0, t1, n, cache);
  return out;
}

std::size_t computational_index(const SystemLayout& layout, QubitPair pair, std::size_t a,
                                std::size_t b) {
  layout.check_pair(pair);
  if (a > 1 || b > 1) throw std::out_of_range("computational_index: qubit level must be 0 or 1");
  std::vector<std::size_t> levels(layout.ordering().factor_count(), 0);
  levels[pair.first] = a;
  levels[pair.second] = b;
  return layout.ordering().flat_index(levels);
}

SubspaceGate qubit_subspace_gate(const Operator& u_full, const SystemLayout& layout,
                                 QubitPair pair) {
  if (u_full.dim() != layout.ordering().dimension()) {
    throw std::invalid_argument("qubit_subspace_gate: operator does not match layout");
  }
  std::array<Eigen::Index, 4> idx{};
  for (std::size_t k = 0; k < 4; ++k) {
    idx[k] = static_cast<Eigen::Index>(computational_index(layout, pair, k >> 1U, k & 1U));
  }
  Matrix block(4, 4);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) block(r, c) = u_full.matrix()(idx[r], idx[c]);
  }
  double min_kept = 1.0;
  for (Eigen::Index c = 0; c < 4; ++c) min_kept = std::min(min_kept, block.col(c).squaredNorm());
  return {Operator(std::move(block)), std::max(0.0, 1.0 - min_kept)};
}

QubitChannel QubitChannel::from_unitary(const Operator& block) {
  if (block.dim() != 4) throw std::invalid_argument("QubitChannel: block must be 4x4");
  QubitChannel ch;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      ch.images[4 * i + j] = block.matrix().col(ii) * block.matrix().col(jj).adjoint();
    }
  }
  return ch;
}

QubitChannel qubit_subspace_channel(const SystemLayout& layout, QubitPair pair,
                                    const HamiltonianSource& h,
                                    const std::vector<CollapseOperator>& collapse, double t0,
                                    double t1, const EvolutionSettings& settings) {
  const auto& ord = layout.ordering();
  const auto dim = static_cast<Eigen::Index>(ord.dimension());
  std::array<Eigen::Index, 4> idx{};
  for (std::size_t k = 0; k < 4; ++k) {
    idx[k] = static_cast<Eigen::Index>(computational_index(layout, pair, k >> 1U, k & 1U));
  }
  // Only i <= j is evolved; the rest follow from E(X†) = E(X)†.
  std::vector<Matrix> inputs;
  std::vector<std::pair<std::size_t, std::size_t>> labels;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i; j < 4; ++j) {
      Matrix m = Matrix::Zero(dim, dim);
      m(idx[i], idx[j]) = 1.0;
      inputs.push_back(std::move(m));
      labels.emplace_back(i, j);
    }
  }
  Vector psi = Vector::Zero(dim);
  for (auto k : idx) psi(k) = 0.5;
  const Matrix probe = psi * psi.adjoint();

  const LindbladBatch batch = evolve_lindblad_batch(probe, inputs, h, collapse, t0, t1, settings);

  const bool swapped = pair.first > pair.second;
  const std::array<std::size_t, 2> keep{std::min(pair.first, pair.second),
                                        std::max(pair.first, pair.second)};
  QubitChannel ch;
  for (std::size_t n = 0; n < batch.finals.size(); ++n) {
    Matrix red = partial_trace(DensityMatrix(batch.finals[n]), keep, ord).matrix();
    if (swapped) {
      Matrix p(4, 4);
      for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
          p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              red(static_cast<Eigen::Index>(swap_pair_bits(r)),
                  static_cast<Eigen::Index>(swap_pair_bits(c)));
        }
      }
      red = std::move(p);
    }
    const auto [i, j] = labels[n];
    ch.images[4 * j + i] = red.adjoint();
    ch.images[4 * i + j] = std::move(red);
  }
  return ch;
}

double average_gate_fidelity(const Operator& actual, const Operator& ideal) {
  check_fidelity_inputs(ideal);
  if (actual.dim() != 4) throw std::invalid_argument("fidelity: actual gate must be 4x4");
  const cplx tr = (ideal.matrix().adjoint() * actual.matrix()).trace();
  return std::clamp((std::norm(tr) + 4.0) / 20.0, 0.0, 1.0);
}

double average_gate_fidelity(const QubitChannel& actual, const Operator& ideal) {
  check_fidelity_inputs(ideal);
  const Matrix& v = ideal.matrix();
  double fe = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const Matrix& e = actual.image(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      fe += (v.col(i).adjoint() * e * v.col(j))(0, 0).real();
    }
  }
  fe /= 16.0;
  return std::clamp((4.0 * fe + 1.0) / 5.0, 0.0, 1.0);
}

Operator local_z(double phi1, double phi2) {
  const auto r = z_phases(phi1, phi2);
  Matrix m = Matrix::Zero(4, 4);
  for (Eigen::Index k = 0; k < 4; ++k) m(k, k) = r[static_cast<std::size_t>(k)];
  return Operator(std::move(m));
}

LocalZFit fit_local_z(const Operator& actual, const Operator& ideal) {
  check_fidelity_inputs(ideal);
  if (actual.dim() != 4) throw std::invalid_argument("fidelity: actual gate must be 4x4");
  // Tr(V† R A) = Σ_k R_k c_k.
  std::array<cplx, 4> c{};
  for (Eigen::Index k = 0; k < 4; ++k) {
    c[static_cast<std::size_t>(k)] =
        ideal.matrix().row(k).conjugate().cwiseProduct(actual.matrix().row(k)).sum();
  }
  const double base = average_gate_fidelity(actual, ideal);
  LocalZFit fit = maximise_local_z([&](double p1, double p2) {
    const auto r = z_phases(p1, p2);
    cplx tr = 0.0;
    for (std::size_t k = 0; k < 4; ++k) tr += r[k] * c[k];
    return std::min(1.0, (std::norm(tr) + 4.0) / 20.0);
  });
  if (fit.fidelity < base) fit = {base, 0.0, 0.0};
  return fit;
}

LocalZFit fit_local_z(const QubitChannel& actual, const Operator& ideal) {
  check_fidelity_inputs(ideal);
  const Matrix& v = ideal.matrix();
  // F_e(R E R†) = Σ_kl R_k conj(R_l) M_kl.
  Matrix m = Matrix::Zero(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const Matrix& e = actual.image(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      for (Eigen::Index k = 0; k < 4; ++k) {
        for (Eigen::Index l = 0; l < 4; ++l) m(k, l) += std::conj(v(k, i)) * e(k, l) * v(l, j);
      }
    }
  }
  m /= 16.0;
  const double base = average_gate_fidelity(actual, ideal);
  LocalZFit fit = maximise_local_z([&](double p1, double p2) {
    const auto r = z_phases(p1, p2);
    cplx fe = 0.0;
    for (Eigen::Index k = 0; k < 4; ++k) {
      for (Eigen::Index l = 0; l < 4; ++l) {
        fe += r[static_cast<std::size_t>(k)] * std::conj(r[static_cast<std::size_t>(l)]) * m(k, l);
      }
    }
    return std::clamp((4.0 * fe.real() + 1.0) / 5.0, 0.0, 1.0);
  });
  if (fit.fidelity < base) fit = {base, 0.0, 0.0};
  return fit;
}

double fidelity_after_local_z(const Operator& actual, const Operator& ideal) {
  return fit_local_z(actual, ideal).fidelity;
}

double fidelity_after_local_z(const QubitChannel& actual, const Operator& ideal) {
  return fit_local_z(actual, ideal).fidelity;
}

Trajectory<StateVector> exchange_population_series(const SystemLayout& layout, QubitPair pair,
                                                   double j, double delta, double t_max,
                                                   std::size_t points,
                                                   const EvolutionSettings& settings) {
  layout.check_pair(pair);
  if (points < 2) throw std::invalid_argument("exchange_population_series: points must be >= 2");
  if (!(t_max > 0.0)) throw std::invalid_argument("exchange_population_series: t_max must be > 0");

  Trajectory<StateVector> traj;
  for (std::size_t k = 0; k < points; ++k) {
    traj.times.push_back(t_max * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  auto& p01e = traj.observables["p01_eff"];
  auto& p10e = traj.observables["p10_eff"];
  auto& p01f = traj.observables["p01_full"];
  auto& p10f = traj.observables["p10_full"];
  auto& leak = traj.observables["leakage"];

  const HilbertOrdering two(2, {});
  const HermitianEigen eig = eigh(iswap_hamiltonian(j, delta, two));
  const Vector psi0 = StateVector::basis(4, 1).amplitudes();
  const Vector c0 = eig.vectors.adjoint() * psi0;
  for (double t : traj.times) {
    Vector phased = c0;
    for (Eigen::Index k = 0; k < phased.size(); ++k) phased(k) *= std::exp(-kI * (eig.values(k) * t));
    StateVector psi(eig.vectors * phased);
    p01e.push_back(psi.population(1));
    p10e.push_back(psi.population(2));
    traj.states.push_back(std::move(psi));
  }

  if (layout.metasurface().modes.empty()) {
    p01f = p01e;
    p10f = p10e;
    for (std::size_t k = 0; k < points; ++k) leak.push_back(std::max(0.0, 1.0 - p01e[k] - p10e[k]));
    return traj;
  }

  ModulationEnvelope window = layout.metasurface().envelope;
  window.shape = EnvelopeShape::Square;
  window.duration = t_max;
  const SystemLayout full = sideband_expanded(layout.with_envelope(window));
  const HamiltonianSource h = corotating_hamiltonian_source(full);
  const std::size_t i01 = computational_index(full, pair, 0, 1);
  const std::size_t i10 = computational_index(full, pair, 1, 0);
  StateVector psi = StateVector::basis(full.ordering().dimension(), i01);
  for (std::size_t k = 0; k < points; ++k) {
    if (k > 0) psi = propagate_unitary(h, traj.times[k - 1], traj.times[k], settings) * psi;
    const double a = psi.population(i01), b = psi.population(i10);
    p01f.push_back(a);
    p10f.push_back(b);
    leak.push_back(std::max(0.0, 1.0 - a - b));
  }
  return traj;
}

}  // namespace metagate
