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

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace metagate {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Dense square complex matrix on a composite Hilbert space.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix data);

  static Operator identity(std::size_t dim);
  static Operator zero(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(data_.rows()); }
  const Matrix& matrix() const { return data_; }
  cplx operator()(std::size_t row, std::size_t col) const {
    return data_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  Operator adjoint() const { return Operator(data_.adjoint()); }

  double max_abs() const;
  /// max|A - A†| / max|A|; zero for the zero matrix.
  double hermiticity_defect() const;
  /// max|A†A - I|.
  double unitarity_defect() const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, cplx s) { return lhs *= s; }
  friend Operator operator*(cplx s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);
  friend bool operator==(const Operator& a, const Operator& b) { return a.data_ == b.data_; }

 private:
  Matrix data_;
};

/// Commutator [a, b].
Operator commutator(const Operator& a, const Operator& b);

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(Vector amplitudes);
  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  double norm() const { return amps_.norm(); }
  double population(std::size_t i) const { return std::norm((*this)[i]); }

  friend StateVector operator*(const Operator& op, const StateVector& psi);

 private:
  Vector amps_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Matrix data);
  static DensityMatrix pure(const StateVector& psi);

  std::size_t dim() const { return static_cast<std::size_t>(data_.rows()); }
  const Matrix& matrix() const { return data_; }
  cplx operator()(std::size_t row, std::size_t col) const {
    return data_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }
  cplx trace() const { return data_.trace(); }
  double min_eigenvalue() const;
  double hermiticity_defect() const;

 private:
  Matrix data_;
};

/// Tensor-factor layout: qubits first, then bosonic modes. The first factor
/// is the most significant (slowest-varying) index.
class HilbertOrdering {
 public:
  HilbertOrdering(std::size_t qubit_count, std::vector<std::size_t> mode_truncations);

  std::size_t qubit_count() const { return qubits_; }
  std::size_t mode_count() const { return truncations_.size(); }
  std::size_t factor_count() const { return qubits_ + truncations_.size(); }
  std::size_t factor_dim(std::size_t factor) const;
  std::size_t mode_factor(std::size_t mode) const;
  std::size_t mode_truncation(std::size_t mode) const { return truncations_.at(mode); }
  const std::vector<std::size_t>& mode_truncations() const { return truncations_; }
  std::size_t dimension() const { return dimension_; }
  std::vector<std::size_t> factor_dims() const;

  std::size_t flat_index(std::span<const std::size_t> levels) const;
  std::vector<std::size_t> levels(std::size_t flat) const;

  /// local ⊗ identities, with `local` acting on `factor`.
  Operator embed(const Operator& local, std::size_t factor) const;

  friend bool operator==(const HilbertOrdering&, const HilbertOrdering&) = default;

 private:
  std::size_t qubits_;
  std::vector<std::size_t> truncations_;
  std::vector<std::size_t> strides_;
  std::size_t dimension_;
};

enum class Pauli { X, Y, Z, Plus, Minus };

Operator pauli(Pauli which);
/// Truncated annihilator: b|n> = sqrt(n)|n-1>.
Operator annihilator(std::size_t levels);

Operator kron(const Operator& a, const Operator& b);
Operator embed_pauli(Pauli which, std::size_t qubit, const HilbertOrdering& ordering);
Operator embed_annihilator(std::size_t mode, const HilbertOrdering& ordering);

/// exp(scale * h) for Hermitian h via eigendecomposition.
Operator expm_hermitian(const Operator& h, cplx scale);

/// Eigendecomposition of a Hermitian operator: h = V diag(values) V†.
struct HermitianEigen {
  Eigen::VectorXd values;
  Matrix vectors;
};
HermitianEigen eigh(const Operator& h);

/// Traces out every factor not listed in `keep`. An empty `keep` yields the
/// 1x1 scalar trace.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep,
                            const HilbertOrdering& ordering);

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-9;

}  // namespace metagate
