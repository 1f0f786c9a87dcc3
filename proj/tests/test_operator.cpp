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

#include <doctest.h>

#include <random>
#include <vector>

#include "metagate/operator.hpp"
#include "test_support.hpp"

using namespace metagate;
using metagate::testing::max_abs_diff;

TEST_CASE("pauli conventions: Z|0> = +|0>, sigma+ = |1><0|") {
  const Operator z = pauli(Pauli::Z);
  const StateVector zero = StateVector::basis(2, 0);
  CHECK((z * zero)[0] == cplx(1.0));
  const StateVector raised = pauli(Pauli::Plus) * zero;
  CHECK(raised.population(1) == doctest::Approx(1.0));
  CHECK(pauli(Pauli::Minus) == pauli(Pauli::Plus).adjoint());
  // XY = iZ
  const Operator xy = pauli(Pauli::X) * pauli(Pauli::Y);
  CHECK(max_abs_diff(xy.matrix(), (kI * z).matrix()) == 0.0);
  // (X - iY)/2 = |1><0|
  const Operator sp = (pauli(Pauli::X) + pauli(Pauli::Y) * (-kI)) * cplx(0.5);
  CHECK(max_abs_diff(sp.matrix(), pauli(Pauli::Plus).matrix()) == 0.0);
}

TEST_CASE("annihilator matrix elements and truncated commutator") {
  const std::size_t n = 5;
  const Operator a = annihilator(n);
  for (std::size_t k = 1; k < n; ++k) {
    const StateVector lowered = a * StateVector::basis(n, k);
    CHECK(lowered.population(k - 1) == doctest::Approx(static_cast<double>(k)));
  }
  const Operator c = commutator(a, a.adjoint());
  for (std::size_t k = 0; k + 1 < n; ++k) CHECK(c(k, k).real() == doctest::Approx(1.0));
  // The top level carries the truncation artefact 1 - n.
  CHECK(c(n - 1, n - 1).real() == doctest::Approx(1.0 - static_cast<double>(n)));
}

TEST_CASE("kron against explicit index arithmetic") {
  std::mt19937_64 rng(7);
  const Operator a(testing::random_hermitian(rng, 2));
  const Operator b(testing::random_hermitian(rng, 3));
  const Operator k = kron(a, b);
  REQUIRE(k.dim() == 6);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t q = 0; q < 3; ++q) CHECK(k(3 * i + p, 3 * j + q) == a(i, j) * b(p, q));
}

TEST_CASE("HilbertOrdering: qubits first, first factor most significant") {
  const HilbertOrdering o(2, {3});
  CHECK(o.dimension() == 12);
  CHECK(o.mode_factor(0) == 2);
  const std::vector<std::size_t> lv{1, 0, 2};
  CHECK(o.flat_index(lv) == 1 * 6 + 0 * 3 + 2);
  // sigma_z on qubit 0 is diagonal with sign set by the most significant bit.
  const Operator z0 = embed_pauli(Pauli::Z, 0, o);
  CHECK(z0(0, 0).real() == 1.0);
  CHECK(z0(6, 6).real() == -1.0);
  const Operator b = embed_annihilator(0, o);
  CHECK(b(0, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("property: flat_index and levels are inverse") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> nq(1, 3), nm(0, 2), tr(2, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> truncs(nm(rng));
    for (auto& t : truncs) t = tr(rng);
    const HilbertOrdering o(nq(rng), truncs);
    for (std::size_t flat = 0; flat < o.dimension(); ++flat) {
      const auto lv = o.levels(flat);
      REQUIRE(o.flat_index(lv) == flat);
    }
  }
}

TEST_CASE("HilbertOrdering error paths") {
  CHECK_THROWS_AS(HilbertOrdering(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(HilbertOrdering(1, {1}), std::invalid_argument);
  const HilbertOrdering o(1, {3});
  CHECK_THROWS_AS(o.factor_dim(2), std::out_of_range);
  CHECK_THROWS_AS(o.mode_factor(1), std::out_of_range);
  CHECK_THROWS_AS(o.levels(6), std::out_of_range);
  const std::vector<std::size_t> bad{0, 3};
  CHECK_THROWS_AS(o.flat_index(bad), std::out_of_range);
  const std::vector<std::size_t> short_lv{0};
  CHECK_THROWS_AS(o.flat_index(short_lv), std::invalid_argument);
  CHECK_THROWS_AS(o.embed(pauli(Pauli::X), 1), std::invalid_argument);
  CHECK_THROWS_AS(embed_pauli(Pauli::X, 1, o), std::out_of_range);
}

TEST_CASE("Operator error paths and defects") {
  CHECK_THROWS_AS(Operator(Matrix::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(Operator::identity(2) * Operator::identity(3), std::invalid_argument);
  CHECK_THROWS_AS(StateVector{Vector{}}, std::invalid_argument);
  CHECK_THROWS_AS(StateVector::basis(2, 2), std::out_of_range);
  CHECK_THROWS_AS(Operator::identity(3) * StateVector::basis(2, 0), std::invalid_argument);
  CHECK(Operator::zero(3).hermiticity_defect() == 0.0);
  CHECK(Operator::identity(4).unitarity_defect() == 0.0);
  CHECK(pauli(Pauli::Plus).hermiticity_defect() > 0.5);
  Matrix nonherm = Matrix::Zero(2, 2);
  nonherm(0, 1) = 1.0;
  CHECK_THROWS_AS(eigh(Operator(nonherm)), std::invalid_argument);
}

TEST_CASE("property: expm_hermitian matches a Taylor oracle and is unitary") {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const Matrix h = testing::random_hermitian(rng, n, 0.7);
    const double t = 0.3 + 0.1 * trial;
    const Operator u = expm_hermitian(Operator(h), -kI * t);
    const Matrix oracle = testing::taylor_expm(-kI * t * h);
    CHECK(max_abs_diff(u.matrix(), oracle) < 1e-11);
    CHECK(u.unitarity_defect() < 1e-12);
  }
  CHECK(expm_hermitian(Operator::zero(3), -kI) == Operator::identity(3));
}

TEST_CASE("eigh reconstructs the matrix") {
  std::mt19937_64 rng(3);
  const Matrix h = testing::random_hermitian(rng, 6);
  const HermitianEigen e = eigh(Operator(h));
  const Matrix back = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
  CHECK(max_abs_diff(back, h) < 1e-12);
  for (Eigen::Index k = 1; k < e.values.size(); ++k) CHECK(e.values(k) >= e.values(k - 1));
}

TEST_CASE("property: partial trace of product states and trace preservation") {
  std::mt19937_64 rng(99);
  const HilbertOrdering o(2, {3});
  for (int trial = 0; trial < 20; ++trial) {
    const Vector a = testing::random_state(rng, 2);
    const Vector b = testing::random_state(rng, 2);
    const Vector c = testing::random_state(rng, 3);
    Vector psi(12);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 3; ++k) psi(6 * i + 3 * j + k) = a(i) * b(j) * c(k);
    const DensityMatrix rho = DensityMatrix::pure(StateVector(psi));
    const std::vector<std::size_t> keep_q{0, 1};
    const DensityMatrix red = partial_trace(rho, keep_q, o);
    Vector ab(4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) ab(2 * i + j) = a(i) * b(j);
    CHECK(max_abs_diff(red.matrix(), ab * ab.adjoint()) < 1e-14);
    const std::vector<std::size_t> keep_m{2};
    const DensityMatrix rm = partial_trace(rho, keep_m, o);
    CHECK(max_abs_diff(rm.matrix(), c * c.adjoint()) < 1e-14);
    CHECK(std::abs(rm.trace() - cplx(1.0)) < 1e-14);
  }
  const DensityMatrix rho = DensityMatrix::pure(StateVector::basis(12, 0));
  const std::vector<std::size_t> dup{0, 0}, oob{3};
  CHECK_THROWS_AS(partial_trace(rho, dup, o), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(rho, oob, o), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(DensityMatrix::pure(StateVector::basis(4, 0)), oob, o),
                  std::invalid_argument);
}

TEST_CASE("density matrix diagnostics") {
  const DensityMatrix rho = DensityMatrix::pure(StateVector::basis(3, 1));
  CHECK(rho.min_eigenvalue() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(rho.hermiticity_defect() == 0.0);
  CHECK_THROWS_AS(DensityMatrix(Matrix::Zero(2, 3)), std::invalid_argument);
}
