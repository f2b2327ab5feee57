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

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chronos/errors.hpp"
#include "chronos/hermitian.hpp"

// Clock problem model. Frequencies are phases accumulated over one probe
// (probe time 1, reference frequency 0), so every quantity is unitless.
namespace chronos::model {

using herm::Complex;
using herm::ComplexMatrix;
using herm::RealVector;

enum class PriorKind { Gaussian, Uniform, Discrete };

struct PriorSpec {
  PriorKind kind = PriorKind::Gaussian;
  double mean = 0.0;    // Gaussian
  double stddev = 1.0;  // Gaussian
  double lo = 0.0;      // Uniform
  double hi = 1.0;      // Uniform
  std::vector<double> points;   // Discrete, strictly increasing
  std::vector<double> weights;  // Discrete

  static PriorSpec gaussian(double mean, double stddev);
  static PriorSpec uniform(double lo, double hi);
  static PriorSpec discrete(std::vector<double> points, std::vector<double> weights);

  [[nodiscard]] bool continuous() const { return kind != PriorKind::Discrete; }
  /// Throws DomainError if the parameters break the invariants.
  void validate() const;
};

std::string to_string(PriorKind k);

/// Density. Discrete priors have no density and throw DomainError.
double prior_pdf(const PriorSpec& prior, double x);
/// Cumulative distribution; right-continuous step function for Discrete.
double prior_cdf(const PriorSpec& prior, double x);
/// Inverse cdf on (0, 1). Gaussian uses Newton on the cdf started from a
/// rational approximation.
double prior_invcdf(const PriorSpec& prior, double q);

enum class CostKind { Quadratic, Periodic, Absolute };
enum class BayesStatistic { Mean, Median, NumericArgmin };

struct CostModel {
  CostKind kind = CostKind::Quadratic;

  [[nodiscard]] double value(double x) const;
  /// Upper bound b on C''; only the quadratic cost has one.
  [[nodiscard]] std::optional<double> curvature_bound() const;
  [[nodiscard]] BayesStatistic bayes_statistic() const;
};

std::string to_string(CostKind k);
CostKind cost_kind_from_string(const std::string& s);

/// Point estimate minimizing sum_x C(omega_x - g) w_x over g. Mean for the
/// quadratic cost, weighted median for the absolute cost, golden-section
/// search on [min omega, max omega] otherwise.
double bayes_estimate(const CostModel& cost, const RealVector& omegas, const RealVector& weights);

struct ClockScenario {
  int atoms = 1;    // N; the query space has N + 1 Dicke levels
  int queries = 1;  // t_f
  PriorSpec prior;
  CostModel cost;
  int d = 15;
  std::vector<double> estimates;  // F, strictly increasing
  // Discretize the prior folded onto one period around its center. Only
  // meaningful for the periodic cost, where omega and omega + 2 pi are
  // indistinguishable.
  bool wrap_phase = false;

  void validate() const;
};

struct DiscretizedPrior {
  RealVector omegas;
  RealVector weights;

  [[nodiscard]] int size() const { return static_cast<int>(omegas.size()); }
  void validate() const;
};

/// Discrete prior as a DiscretizedPrior, unchanged.
DiscretizedPrior as_discretized(const PriorSpec& prior);

/// Phi_k(x, y) = exp(i k (omega_x - omega_y)).
ComplexMatrix oracle_phase_matrix(const RealVector& omegas, int k);

/// diag(C(omega_x - f)).
ComplexMatrix cost_operator(const RealVector& omegas, double f, const CostModel& cost);

/// rho_0(x, y) = sqrt(p_x p_y).
ComplexMatrix initial_oracle_state(const RealVector& weights);

/// {"kind": ..., "params": {...}} with the parameters of that kind.
nlohmann::json to_json(const PriorSpec& prior);
/// atoms, queries, prior, cost, d and the explicit estimate list.
nlohmann::json to_json(const ClockScenario& scenario);

}  // namespace chronos::model
