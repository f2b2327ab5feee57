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

#include <nlohmann/json.hpp>

#include "chronos/program.hpp"

// Physical protocol extracted from an SDP solution: initial querier state,
// inter-query unitaries and a measurement, all on Q (Dicke levels) times an
// ancilla A. Querier indices are k * ancilla_dim + i.
namespace chronos::reconstruct {

using herm::ComplexMatrix;
using herm::ComplexVector;
using herm::RealVector;

/// POVM with each element stored both densely and as P_a = L_a L_a^dagger.
struct Povm {
  std::vector<ComplexMatrix> elements;
  std::vector<ComplexMatrix> factors;
};

struct ReconstructedProtocol {
  int atoms = 1;
  int queries = 1;
  int ancilla_dim = 1;
  herm::PureState psi0;                  // systems (Q, A)
  std::vector<ComplexMatrix> unitaries;  // V_1 .. V_{queries - 1}
  Povm povm;
  std::vector<double> estimates;

  [[nodiscard]] int querier_dim() const { return (atoms + 1) * ancilla_dim; }
  [[nodiscard]] int outcomes() const { return static_cast<int>(povm.elements.size()); }
};

/// The query Omega(omega) |k> = exp(i k omega) |k>, identity on A. This sign
/// reproduces the SDP marginals at the discretized frequencies.
ComplexVector apply_query(const ComplexVector& psi, int atoms, int ancilla_dim, double omega);

/// Initial state and unitaries; the POVM is left empty. Throws
/// EigenbasisMismatch if a queried oracle marginal disagrees with the next
/// step's marginal by more than 1e-6.
ReconstructedProtocol reconstruct_unitaries(const program::InterrogationSolution& solution);

/// Joint oracle/querier state after the last query, systems (O, Q, A).
herm::PureState final_state(const ReconstructedProtocol& protocol, const model::DiscretizedPrior& dp);

/// Measurement on the querier side of `final_state` (systems O first) that
/// remotely prepares sigma_a on O. The orthogonal complement of the Schmidt
/// support goes to outcome 0. Throws RemotePrepMismatch if sum_a sigma_a
/// differs from the oracle marginal by more than 1e-7.
Povm build_povm(const herm::PureState& final_state, const std::vector<ComplexMatrix>& sigma);

/// reconstruct_unitaries followed by build_povm.
ReconstructedProtocol reconstruct_protocol(const program::InterrogationSolution& solution);

/// Outcome distribution q(a | omega).
RealVector simulate(const ReconstructedProtocol& protocol, double omega);

/// |<k|psi0>| with the ancilla traced out.
RealVector dicke_amplitudes(const ReconstructedProtocol& protocol);

struct VerifyReport {
  double marginal_residual = 0.0;      // max_{a,x} |q(a|omega_x) p_x - (sigma_a)_xx|
  double completeness_residual = 0.0;  // ||sum_a P_a - I||_max
  double positivity_residual = 0.0;    // max(0, -min eigenvalue of any P_a)
  double unitarity_residual = 0.0;     // max ||V^dagger V - I||_max
  double norm_residual = 0.0;          // | ||psi0|| - 1 |
  double expected_cost_residual = 0.0; // |sum C q p - cost|

  [[nodiscard]] bool passing(double tol = 1e-5) const;
};

VerifyReport verify_protocol(const ReconstructedProtocol& protocol, const program::InterrogationSolution& solution);

/// Largest of the residuals.
double worst_residual(const VerifyReport& report);

nlohmann::json to_json(const VerifyReport& report);

/// psi0 amplitudes, unitaries, POVM elements and estimates. Complex
/// matrices are {"re": rows, "im": rows}.
nlohmann::json to_json(const ReconstructedProtocol& protocol);

}  // namespace chronos::reconstruct
