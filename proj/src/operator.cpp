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

#include "metagate/operator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace metagate {

namespace {

// Relative non-Hermiticity accepted by expm_hermitian.
constexpr double kExpmHermitianTolerance = 1e-10;

double max_abs_of(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

Operator::Operator(Matrix data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols()) {
    throw std::invalid_argument("Operator: matrix is not square (" + std::to_string(data_.rows()) +
                                "x" + std::to_string(data_.cols()) + ")");
  }
}

Operator Operator::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Operator(Matrix::Identity(n, n));
}

Operator Operator::zero(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Operator(Matrix::Zero(n, n));
}

double Operator::max_abs() const { return max_abs_of(data_); }

double Operator::hermiticity_defect() const {
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  return max_abs_of(data_ - data_.adjoint()) / scale;
}

double Operator::unitarity_defect() const {
  const auto n = data_.rows();
  return max_abs_of(data_.adjoint() * data_ - Matrix::Identity(n, n));
}

Operator& Operator::operator+=(const Operator& rhs) {
  data_ += rhs.data_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  data_ -= rhs.data_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  data_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("Operator product: dimension mismatch");
  return Operator(a.data_ * b.data_);
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

StateVector::StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw std::invalid_argument("StateVector: empty");
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("StateVector::basis: index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

StateVector operator*(const Operator& op, const StateVector& psi) {
  if (op.dim() != psi.dim()) throw std::invalid_argument("Operator * state: dimension mismatch");
  return StateVector(op.matrix() * psi.amplitudes());
}

DensityMatrix::DensityMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols()) throw std::invalid_argument("DensityMatrix: not square");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix herm = 0.5 * (data_ + data_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double DensityMatrix::hermiticity_defect() const { return max_abs_of(data_ - data_.adjoint()); }

HilbertOrdering::HilbertOrdering(std::size_t qubit_count, std::vector<std::size_t> mode_truncations)
    : qubits_(qubit_count), truncations_(std::move(mode_truncations)) {
  for (std::size_t i = 0; i < truncations_.size(); ++i) {
    if (truncations_[i] < 2) {
      throw std::invalid_argument("HilbertOrdering: mode " + std::to_string(i) +
                                  " truncation must be >= 2");
    }
  }
  if (factor_count() == 0) throw std::invalid_argument("HilbertOrdering: no factors");
  const auto dims = factor_dims();
  strides_.assign(dims.size(), 1);
  dimension_ = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    strides_[k] = dimension_;
    dimension_ *= dims[k];
  }
}

std::size_t HilbertOrdering::factor_dim(std::size_t factor) const {
  if (factor < qubits_) return 2;
  if (factor < factor_count()) return truncations_[factor - qubits_];
  throw std::out_of_range("HilbertOrdering: factor " + std::to_string(factor) + " out of range");
}

std::size_t HilbertOrdering::mode_factor(std::size_t mode) const {
  if (mode >= truncations_.size()) {
    throw std::out_of_range("HilbertOrdering: mode " + std::to_string(mode) + " out of range");
  }
  return qubits_ + mode;
}

std::vector<std::size_t> HilbertOrdering::factor_dims() const {
  std::vector<std::size_t> dims(qubits_, 2);
  dims.insert(dims.end(), truncations_.begin(), truncations_.end());
  return dims;
}

std::size_t HilbertOrdering::flat_index(std::span<const std::size_t> levels) const {
  if (levels.size() != factor_count()) {
    throw std::invalid_argument("HilbertOrdering::flat_index: wrong number of levels");
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] >= factor_dim(k)) throw std::out_of_range("HilbertOrdering: level out of range");
    flat += levels[k] * strides_[k];
  }
  return flat;
}

std::vector<std::size_t> HilbertOrdering::levels(std::size_t flat) const {
  if (flat >= dimension_) throw std::out_of_range("HilbertOrdering::levels: index out of range");
  std::vector<std::size_t> out(factor_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = flat / strides_[k];
    flat %= strides_[k];
  }
  return out;
}

Operator HilbertOrdering::embed(const Operator& local, std::size_t factor) const {
  if (local.dim() != factor_dim(factor)) {
    throw std::invalid_argument("HilbertOrdering::embed: local operator has wrong dimension");
  }
  const std::size_t left = dimension_ / (strides_[factor] * local.dim());
  const std::size_t right = strides_[factor];
  return kron(Operator::identity(left), kron(local, Operator::identity(right)));
}

Operator pauli(Pauli which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case Pauli::X:
      m(0, 1) = m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case Pauli::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Pauli::Plus:  // |1><0|, raises |0> (Z=+1) to |1> (Z=-1)
      m(1, 0) = 1.0;
      break;
    case Pauli::Minus:
      m(0, 1) = 1.0;
      break;
  }
  return Operator(std::move(m));
}

Operator annihilator(std::size_t levels) {
  const auto n = static_cast<Eigen::Index>(levels);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
  return Operator(std::move(m));
}

Operator kron(const Operator& a, const Operator& b) {
  const auto na = static_cast<Eigen::Index>(a.dim());
  const auto nb = static_cast<Eigen::Index>(b.dim());
  Matrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
    }
  }
  return Operator(std::move(out));
}

Operator embed_pauli(Pauli which, std::size_t qubit, const HilbertOrdering& ordering) {
  if (qubit >= ordering.qubit_count()) {
    throw std::out_of_range("embed_pauli: qubit " + std::to_string(qubit) + " out of range");
  }
  return ordering.embed(pauli(which), qubit);
}

Operator embed_annihilator(std::size_t mode, const HilbertOrdering& ordering) {
  const std::size_t factor = ordering.mode_factor(mode);
  return ordering.embed(annihilator(ordering.factor_dim(factor)), factor);
}

HermitianEigen eigh(const Operator& h) {
  if (h.hermiticity_defect() > kExpmHermitianTolerance) {
    throw std::invalid_argument("eigh: operator is not Hermitian (relative defect " +
                                std::to_string(h.hermiticity_defect()) + ")");
  }
  const Matrix herm = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Operator expm_hermitian(const Operator& h, cplx scale) {
  if (h.max_abs() == 0.0) return Operator::identity(h.dim());
  const HermitianEigen eig = eigh(h);
  Vector phases(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) phases(k) = std::exp(scale * eig.values(k));
  return Operator(eig.vectors * phases.asDiagonal() * eig.vectors.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep,
                            const HilbertOrdering& ordering) {
  if (rho.dim() != ordering.dimension()) {
    throw std::invalid_argument("partial_trace: density matrix does not match ordering");
  }
  const std::set<std::size_t> kept(keep.begin(), keep.end());
  if (kept.size() != keep.size()) throw std::invalid_argument("partial_trace: duplicate factor");
  for (std::size_t f : kept) {
    if (f >= ordering.factor_count()) {
      throw std::invalid_argument("partial_trace: factor " + std::to_string(f) + " out of range");
    }
  }

  const auto dims = ordering.factor_dims();
  std::size_t kept_dim = 1;
  for (std::size_t f : kept) kept_dim *= dims[f];

  // Split every flat index into (kept part, traced part), most significant first.
  const std::size_t n = ordering.dimension();
  std::vector<std::size_t> kept_index(n), traced_index(n);
  for (std::size_t flat = 0; flat < n; ++flat) {
    const auto lv = ordering.levels(flat);
    std::size_t k = 0, t = 0;
    for (std::size_t f = 0; f < lv.size(); ++f) {
      if (kept.contains(f)) {
        k = k * dims[f] + lv[f];
      } else {
        t = t * dims[f] + lv[f];
      }
    }
    kept_index[flat] = k;
    traced_index[flat] = t;
  }

  const auto kd = static_cast<Eigen::Index>(kept_dim);
  Matrix out = Matrix::Zero(kd, kd);
  const Matrix& m = rho.matrix();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (traced_index[i] != traced_index[j]) continue;
      out(static_cast<Eigen::Index>(kept_index[i]), static_cast<Eigen::Index>(kept_index[j])) +=
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return DensityMatrix(std::move(out));
}

}  // namespace metagate
