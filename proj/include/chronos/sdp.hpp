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
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chronos/errors.hpp"
#include "chronos/hermitian.hpp"

namespace chronos::sdp {

using herm::Complex;
using herm::ComplexMatrix;

/// One stored entry of a coefficient matrix. Both (row, col) and (col, row)
/// are stored explicitly, so tr(A X) = sum over entries of value * X(col, row).
template <typename Scalar>
struct Entry {
  int row = 0;
  int col = 0;
  Scalar value{};
};

/// Coefficient matrix restricted to one block.
template <typename Scalar>
struct Term {
  int block = 0;
  std::vector<Entry<Scalar>> entries;
};

/// sum_b tr(A_b X_b) = rhs
template <typename Scalar>
struct Constraint {
  std::vector<Term<Scalar>> terms;
  double rhs = 0.0;
};

/// minimize sum_b tr(C_b X_b) s.t. the linear constraints, X_b PSD.
/// With Scalar = complex the blocks are Hermitian; with double, real symmetric.
template <typename Scalar>
struct Problem {
  std::vector<int> block_dims;
  std::vector<Term<Scalar>> objective;
  std::vector<Constraint<Scalar>> constraints;

  [[nodiscard]] int num_blocks() const { return static_cast<int>(block_dims.size()); }
};

using BlockSdpProblem = Problem<Complex>;
using RealSdpProblem = Problem<double>;

enum class Status { Optimal, MaxIterations, NumericalFailure };

std::string to_string(Status s);

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-9;
  int max_iter = 200;
  double step_fraction = 0.98;
  double dependent_row_tol = 1e-10;

  /// Defaults with CHRONOS_SDP_TOL, when set, overriding gap_tol.
  static SolverOptions from_environment();
};

struct BlockSdpSolution {
  std::vector<ComplexMatrix> blocks;
  Eigen::VectorXd y;  // one entry per constraint of the input problem
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  int dropped_rows = 0;
  Status status = Status::NumericalFailure;
};

struct RealSdpSolution {
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<Eigen::MatrixXd> slacks;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  int dropped_rows = 0;
  Status status = Status::NumericalFailure;
};

struct Residuals {
  double max_constraint_violation = 0.0;
  double min_block_eigenvalue = 0.0;
  double duality_gap = 0.0;
};

/// Checks shapes, Hermiticity of every coefficient, and block references.
template <typename Scalar>
void validate(const Problem<Scalar>& problem);

/// Maps each d-dimensional Hermitian block to the 2d real symmetric block
/// [[Re H, -Im H], [Im H, Re H]], with coefficients scaled by 1/2 so that
/// trace inner products are unchanged.
RealSdpProblem real_embed(const BlockSdpProblem& problem);

/// Real embedding of a single Hermitian matrix (unscaled).
Eigen::MatrixXd embed_matrix(const ComplexMatrix& h);

/// Inverse of embed_matrix, averaging the two redundant copies.
ComplexMatrix extract_matrix(const Eigen::MatrixXd& y);

/// Primal-dual path-following interior-point method (HKM direction,
/// Mehrotra predictor-corrector) on real symmetric blocks.
RealSdpSolution solve_real(const RealSdpProblem& problem, const SolverOptions& opts = {});

/// Solves a Hermitian block problem through its real embedding.
BlockSdpSolution solve(const BlockSdpProblem& problem, const SolverOptions& opts = {});

/// Recomputes feasibility, PSD-ness and duality gap directly from the
/// problem data and the returned blocks and multipliers.
Residuals residuals(const BlockSdpProblem& problem, const BlockSdpSolution& solution);

/// Objective value sum_b tr(C_b X_b) for the given blocks.
double objective_value(const BlockSdpProblem& problem, const std::vector<ComplexMatrix>& blocks);

/// Values sum_b tr(A_ib X_b) for every constraint i.
Eigen::VectorXd constraint_values(const BlockSdpProblem& problem,
                                  const std::vector<ComplexMatrix>& blocks);

/// Plain-text sparse dump for cross-checking with external solvers.
///
///   # chronos-sdp v1
///   blocks <nb> <dim_0> ... <dim_{nb-1}>
///   constraints <m>
///   rhs <i> <value>                       (one line per constraint, 1-based i)
///   <i> <block> <row> <col> <re> <im>     (one line per stored nonzero)
///
/// Constraint index 0 is the objective; block, row and col are 0-based.
/// Entries are listed in both triangles exactly as stored.
void write_sparse(std::ostream& os, const BlockSdpProblem& problem);

}  // namespace chronos::sdp
