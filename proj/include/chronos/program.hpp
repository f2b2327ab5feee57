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

#include <vector>

#include "chronos/model.hpp"
#include "chronos/sdp.hpp"

namespace chronos::program {

using herm::ComplexMatrix;
using herm::RealVector;

/// Optimal discretized interrogation. B[t][k] is the Dicke-diagonal block
/// B_k^{(t)} of the joint oracle/querier state before query t + 1, and
/// sigma[a] the unnormalized oracle state conditioned on outcome a.
struct InterrogationSolution {
  int atoms = 1;
  int queries = 1;
  model::DiscretizedPrior prior;
  model::CostModel cost_model;
  std::vector<double> estimates;

  std::vector<std::vector<ComplexMatrix>> B;
  std::vector<ComplexMatrix> sigma;

  double cost = 0.0;  // primal objective
  double gap = 0.0;   // |primal - dual|
  double feas = 0.0;  // max residual of the lifted constraints
  int iterations = 0;
  sdp::Status status = sdp::Status::NumericalFailure;

  [[nodiscard]] int d() const { return prior.size(); }
  [[nodiscard]] int outcomes() const { return static_cast<int>(sigma.size()); }
  /// rho^O(t) for t = 0..queries; rho^O(queries) = sum_a sigma_a.
  [[nodiscard]] ComplexMatrix oracle_state(int t) const;
};

/// The clock SDP with d x d blocks B_k^{(t)} (index t (N + 1) + k) followed
/// by sigma_a (index queries (N + 1) + a). Every Hermitian matrix equation
/// contributes d^2 real rows.
sdp::BlockSdpProblem build_clock_sdp(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario);

/// The same program restricted to the subspaces W_t reachable from the
/// initial oracle state, W_0 = span{sqrt p} and W_{t+1} = sum_k D_k W_t with
/// D_k = diag(exp(i k omega_x)). The restriction is strictly feasible,
/// unlike the full program whose initial constraint pins every B_k^{(0)} to
/// the ray of a rank-one matrix.
struct ReducedClockSdp {
  sdp::BlockSdpProblem problem;
  std::vector<ComplexMatrix> bases;  // orthonormal Y_t, t = 0..queries
};

ReducedClockSdp build_reduced_clock_sdp(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario,
                                        double rank_tol = 1e-12);

/// Solves the reduced program and lifts it back to d x d blocks. Throws
/// SolverError, carrying the residuals, if the solver is not Optimal.
InterrogationSolution solve_interrogation(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario,
                                          const sdp::SolverOptions& opts = {});

/// Lifts a solution of build_clock_sdp (full form) into an InterrogationSolution.
InterrogationSolution from_full_solution(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario,
                                         const sdp::BlockSdpSolution& sol);

struct ConstraintResiduals {
  double initial = 0.0;      // || sum_k B_k^{(0)} - rho_0 ||_max
  double propagation = 0.0;  // max over t of the step residuals
  double final = 0.0;        // || sum_a sigma_a - sum_k Phi_k o B_k^{(t_f - 1)} ||_max
  double cost = 0.0;         // | cost - sum_a tr(A_a sigma_a) |
  double min_eigenvalue = 0.0;
};

/// Recomputes the defining constraints of a solution from scratch.
ConstraintResiduals check_solution(const InterrogationSolution& sol);

struct Posteriors {
  Eigen::MatrixXd posterior;  // m x d, row a is p(omega_x | a); zero for unused rows
  RealVector outcome_probs;   // tr(sigma_a)
  std::vector<bool> used;     // tr(sigma_a) >= 1e-12
};

Posteriors posteriors(const InterrogationSolution& sol);

/// Entrywise query map sum_k Phi_k o B_k = sum_k D_k B_k D_k^dagger.
ComplexMatrix apply_query(const RealVector& omegas, const std::vector<ComplexMatrix>& blocks);

}  // namespace chronos::program
