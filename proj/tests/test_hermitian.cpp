// Copyright 2026 The Chronos Authors
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

#include <cmath>
#include <random>

#include "doctest.h"

#include "chronos/hermitian.hpp"
#include "test_util.hpp"

using namespace chronos;
using namespace chronos::herm;

TEST_CASE("herm_eig on a diagonal matrix sorts descending") {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 0) = 3.0;
  h(1, 1) = 1.0;
  h(2, 2) = 2.0;
  const auto e = herm_eig(h);
  CHECK(e.values(0) == doctest::Approx(3.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(e.values(2) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(1, 2)) == doctest::Approx(1.0));
}

TEST_CASE("herm_eig on the Pauli X matrix") {
  ComplexMatrix h(2, 2);
  h << 0.0, 1.0, 1.0, 0.0;
  const auto e = herm_eig(h);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(-1.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(r));
  CHECK(std::abs(e.vectors(0, 0) - e.vectors(1, 0)) < 1e-12);
  CHECK(std::abs(e.vectors(0, 1) + e.vectors(1, 1)) < 1e-12);
}

TEST_CASE("herm_eig recovers a rank-one projector") {
  std::mt19937_64 rng(7);
  ComplexVector v = testing::random_vector(5, rng).normalized();
  const auto e = herm_eig(v * v.adjoint());
  CHECK(e.values(0) == doctest::Approx(1.0));
  for (int i = 1; i < 5; ++i) CHECK(std::abs(e.values(i)) < 1e-12);
  CHECK(std::abs(std::abs(v.dot(e.vectors.col(0))) - 1.0) < 1e-12);
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
  ComplexMatrix h(2, 2);
  h << 0.0, 1.0, 0.5, 0.0;
  CHECK_THROWS_AS(herm_eig(h, 1e-10), NotHermitian);
}

TEST_CASE("herm_eig is reproducible inside degenerate eigenspaces") {
  std::mt19937_64 rng(11);
  ComplexMatrix u = polar_unitary(testing::random_matrix(6, 6, rng));
  Eigen::VectorXd d(6);
  d << 2, 2, 2, 1, 1, 0;
  ComplexMatrix h = u * d.cast<Complex>().asDiagonal() * u.adjoint();
  const auto a = herm_eig(h);
  const auto b = herm_eig(h);
  CHECK((a.vectors - b.vectors).norm() == 0.0);
}

TEST_CASE("herm_eig reconstruction property over random Hermitian matrices") {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> dim_dist(1, 64);
  double worst = 0.0;
  double worst_orth = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = trial < 20 ? 64 : dim_dist(rng);
    ComplexMatrix g = testing::random_matrix(n, n, rng);
    ComplexMatrix h = (g + g.adjoint()) * 0.5;
    const auto e = herm_eig(h);
    ComplexMatrix rec = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    worst = std::max(worst, max_abs(rec - h) / n);
    worst_orth = std::max(
        worst_orth, max_abs(e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(n, n)));
    for (int i = 1; i < n; ++i) REQUIRE(e.values(i - 1) >= e.values(i));
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_orth <= 1e-10);
}

TEST_CASE("purify examples") {
  SUBCASE("pure input has a one-dimensional ancilla") {
    ComplexVector v(2);
    v << Complex(0.6, 0.0), Complex(0.0, 0.8);
    const auto st = purify(v * v.adjoint(), "O", "A");
    CHECK(st.systems[1].dim == 1);
    CHECK(std::abs(std::abs(st.amplitudes.dot(v)) - 1.0) < 1e-12);
  }
  SUBCASE("maximally mixed qubit") {
    const auto st = purify(ComplexMatrix::Identity(2, 2) * 0.5, "O", "A");
    CHECK(st.systems[1].dim == 2);
    CHECK(st.amplitudes.norm() == doctest::Approx(1.0));
    CHECK(max_abs(partial_trace(density(st), st.systems, {"A"}) -
                  ComplexMatrix::Identity(2, 2) * 0.5) < 1e-12);
  }
  SUBCASE("diagonal spectral form") {
    ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
    rho(0, 0) = 0.9;
    rho(1, 1) = 0.1;
    const auto st = purify(rho, "O", "A");
    REQUIRE(st.systems[1].dim == 2);
    // index = x * 2 + i
    CHECK(std::abs(st.amplitudes(0)) == doctest::Approx(std::sqrt(0.9)));
    CHECK(std::abs(st.amplitudes(3)) == doctest::Approx(std::sqrt(0.1)));
    CHECK(std::abs(st.amplitudes(1)) < 1e-14);
    CHECK(std::abs(st.amplitudes(2)) < 1e-14);
  }
  SUBCASE("negative eigenvalue is rejected") {
    ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
    rho(0, 0) = 1.1;
    rho(1, 1) = -0.1;
    CHECK_THROWS_AS(purify(rho, "O", "A"), NotPSD);
  }
}

TEST_CASE("schmidt examples") {
  SUBCASE("product state") {
    ComplexVector a(2), b(3);
    a << 0.6, Complex(0.0, 0.8);
    b << 1.0, 2.0, Complex(0.0, 2.0);
    b.normalize();
    PureState st{{{"L", 2}, {"R", 3}}, Eigen::kroneckerProduct(a, b)};
    const auto s = schmidt(st, {"L"});
    REQUIRE(s.coefficients.size() == 1);
    CHECK(s.coefficients(0) == doctest::Approx(1.0));
  }
  SUBCASE("Bell state") {
    ComplexVector amp = ComplexVector::Zero(4);
    amp(0) = amp(3) = 1.0 / std::sqrt(2.0);
    PureState st{{{"L", 2}, {"R", 2}}, amp};
    const auto s = schmidt(st, {"L"});
    REQUIRE(s.coefficients.size() == 2);
    CHECK(s.coefficients(0) == doctest::Approx(0.5));
    CHECK(s.coefficients(1) == doctest::Approx(0.5));
  }
  SUBCASE("round trip with purify") {
    ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
    rho(0, 0) = 0.9;
    rho(1, 1) = 0.1;
    const auto s = schmidt(purify(rho, "O", "A"), {"O"});
    REQUIRE(s.coefficients.size() == 2);
    CHECK(s.coefficients(0) == doctest::Approx(0.9));
    CHECK(s.coefficients(1) == doctest::Approx(0.1));
  }
  SUBCASE("improper subsets are rejected") {
    PureState st{{{"L", 2}, {"R", 2}}, ComplexVector::Unit(4, 0)};
    CHECK_THROWS_AS(schmidt(st, {"L", "R"}), DimensionMismatch);
    CHECK_THROWS_AS(schmidt(st, {}), DimensionMismatch);
  }
}

TEST_CASE("schmidt reconstructs the state on three subsystems") {
  std::mt19937_64 rng(5);
  PureState st{{{"A", 2}, {"B", 3}, {"C", 2}}, testing::random_vector(12, rng).normalized()};
  const auto s = schmidt(st, {"A", "C"});
  CHECK(s.coefficients.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(max_abs(s.left.adjoint() * s.left -
                ComplexMatrix::Identity(s.left.cols(), s.left.cols())) < 1e-10);
  CHECK(max_abs(s.right.adjoint() * s.right -
                ComplexMatrix::Identity(s.right.cols(), s.right.cols())) < 1e-10);
  // Rebuild amplitudes: index (a,b,c) -> left (a,c), right b.
  ComplexVector rebuilt = ComplexVector::Zero(12);
  for (int j = 0; j < s.coefficients.size(); ++j) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 2; ++c)
          rebuilt(a * 6 + b * 2 + c) +=
              std::sqrt(s.coefficients(j)) * s.left(a * 2 + c, j) * s.right(b, j);
  }
  CHECK((rebuilt - st.amplitudes).norm() < 1e-12);
}

TEST_CASE("partial_trace examples") {
  std::mt19937_64 rng(3);
  ComplexMatrix ra = testing::random_density(2, rng);
  ComplexMatrix rb = testing::random_density(3, rng) * 2.5;
  const std::vector<Subsystem> sys{{"A", 2}, {"B", 3}};
  ComplexMatrix prod = Eigen::kroneckerProduct(ra, rb);
  CHECK(max_abs(partial_trace(prod, sys, {"B"}) - rb.trace() * ra) < 1e-12);
  CHECK(max_abs(partial_trace(prod, sys, {"A"}) - ra.trace() * rb) < 1e-12);

  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  ComplexMatrix half = ComplexMatrix::Identity(2, 2) * 0.5;
  CHECK(max_abs(partial_trace(bell * bell.adjoint(), {{"A", 2}, {"B", 2}}, {"B"}) - half) <
        1e-14);

  const auto all = partial_trace(prod, sys, {"A", "B"});
  REQUIRE(all.rows() == 1);
  CHECK(std::abs(all(0, 0) - prod.trace()) < 1e-12);

  CHECK_THROWS_AS(partial_trace(ComplexMatrix::Identity(5, 5), sys, {"A"}), DimensionMismatch);
}

TEST_CASE("purify and schmidt properties on random density matrices") {
  std::mt19937_64 rng(99);
  double worst_pt = 0.0;
  double worst_sc = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 12;
    const int rank = 1 + trial % n;
    ComplexMatrix g = testing::random_matrix(n, rank, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    const auto st = purify(rho, "O", "A");
    worst_pt = std::max(worst_pt, max_abs(partial_trace(density(st), st.systems, {"A"}) - rho));
    const auto s = schmidt(st, {"O"});
    const auto e = herm_eig(rho);
    for (int j = 0; j < n; ++j) {
      const double qj = j < s.coefficients.size() ? s.coefficients(j) : 0.0;
      worst_sc = std::max(worst_sc, std::abs(qj - std::max(e.values(j), 0.0)));
    }
  }
  CHECK(worst_pt <= 1e-9);
  CHECK(worst_sc <= 1e-9);
}

TEST_CASE("polar helpers") {
  std::mt19937_64 rng(1);
  ComplexMatrix u = polar_unitary(testing::random_matrix(5, 5, rng));
  CHECK(max_abs(u.adjoint() * u - ComplexMatrix::Identity(5, 5)) < 1e-12);
  ComplexMatrix w = polar_isometry(testing::random_matrix(6, 3, rng));
  CHECK(max_abs(w.adjoint() * w - ComplexMatrix::Identity(3, 3)) < 1e-12);
  ComplexMatrix comp = orthogonal_complement(w);
  REQUIRE(comp.cols() == 3);
  CHECK(max_abs(w.adjoint() * comp) < 1e-12);
  CHECK(max_abs(comp.adjoint() * comp - ComplexMatrix::Identity(3, 3)) < 1e-12);
}
