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

#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chronos/errors.hpp"

namespace chronos::herm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Labeled tensor factor of a composite Hilbert space.
struct Subsystem {
  std::string label;
  int dim = 1;
};

/// Pure state on an ordered product of labeled subsystems. The first
/// subsystem is the most significant index of the amplitude vector.
struct PureState {
  std::vector<Subsystem> systems;
  ComplexVector amplitudes;

  [[nodiscard]] int total_dim() const;
  [[nodiscard]] int index_of(const std::string& label) const;
};

struct EigenDecomposition {
  RealVector values;      // descending
  ComplexMatrix vectors;  // column i pairs with values(i)
};

struct SchmidtDecomposition {
  RealVector coefficients;  // q_j = squared Schmidt values, descending, > 0
  ComplexMatrix left;       // columns are |phi_j>
  ComplexMatrix right;      // columns are |varphi_j>
};

/// Largest |H(i,j) - conj(H(j,i))|.
double hermiticity_residual(const ComplexMatrix& h);

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. The sweep order is fixed, so results are reproducible even
/// inside degenerate eigenspaces. Throws NotHermitian if the symmetry
/// residual exceeds `tol`.
EigenDecomposition herm_eig(const ComplexMatrix& h, double tol = 1e-10);

/// |Phi> = sum_i sqrt(lambda_i) |v_i>|i> over the eigenvalues above
/// `rank_tol`; the ancilla dimension equals that numerical rank.
PureState purify(const ComplexMatrix& rho, const std::string& primary_label,
                 const std::string& ancilla_label, double rank_tol = 1e-9);

/// Schmidt form across the bipartition (left_systems | rest). Components
/// with q_j <= `cutoff` are discarded.
SchmidtDecomposition schmidt(const PureState& state,
                             const std::vector<std::string>& left_systems,
                             double cutoff = 1e-15);

/// Traces out `traced` from an operator on the product space `systems`.
ComplexMatrix partial_trace(const ComplexMatrix& m,
                            const std::vector<Subsystem>& systems,
                            const std::vector<std::string>& traced);

/// Projector |psi><psi| of the state's amplitude vector.
ComplexMatrix density(const PureState& state);

/// Hermitian square root of a PSD matrix; eigenvalues below zero are clamped.
ComplexMatrix psd_sqrt(const ComplexMatrix& h);

/// Nearest unitary in Frobenius norm (polar factor via SVD). Rank-deficient
/// inputs get an arbitrary but deterministic unitary completion.
ComplexMatrix polar_unitary(const ComplexMatrix& m);

/// Nearest matrix with orthonormal columns (rows >= cols required).
ComplexMatrix polar_isometry(const ComplexMatrix& m);

/// Orthonormal basis of the orthogonal complement of span(columns of `basis`),
/// where `basis` has orthonormal columns.
ComplexMatrix orthogonal_complement(const ComplexMatrix& basis);

double max_abs(const ComplexMatrix& m);

}  // namespace chronos::herm
