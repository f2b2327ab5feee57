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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chronos/program.hpp"
#include "chronos/reconstruct.hpp"

// Bounds on the continuous clock problem from randomly offset
// discretizations of the prior: a statistical lower bound from the
// per-offset SDP optima, an upper bound from integrating the extracted
// protocols against the continuous prior, and the gap introduced by a
// finite estimate set.
namespace chronos::bounds {

/// Gaussian priors are integrated over mean +- kTruncationSigmas * stddev.
inline constexpr double kTruncationSigmas = 8.0;

/// The d quantile points P^{-1}(o + j/d), each with weight 1/d. With
/// `wrap` the quantiles are those of the prior folded onto
/// [c - pi, c + pi), c the prior center. Throws DomainError for discrete
/// priors or o outside (0, 1/d).
model::DiscretizedPrior discretize_prior(const model::PriorSpec& prior, int d, double o, bool wrap = false);

/// Cdf of the prior folded onto [c - pi, c + pi), for x in that interval.
double wrapped_cdf(const model::PriorSpec& prior, double x);

/// k offsets in (0, 1/d) from a seeded mt19937_64. The raw 64-bit outputs
/// are mapped to doubles by hand, so the sequence is the same on every
/// standard library.
std::vector<double> draw_offsets(int d, int k, std::uint64_t seed);

struct QuadratureOptions {
  int nodes = 20;              // Gauss-Legendre nodes per panel, >= 10
  double max_panel_width = 0;  // 0 selects pi / (4 N t_f) for protocols
  double tolerance = 1e-6;     // allowed change under panel halving
};

/// Composite Gauss-Legendre on [a, b] with panels no wider than
/// max_panel_width. The result is compared against the same rule with
/// halved panels; the finer value is returned. Throws
/// QuadratureNotConverged if the two differ by more than opts.tolerance.
double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opts);

/// Integration range of a continuous prior: truncated for Gaussians, the
/// support for Uniform.
std::pair<double, double> integration_range(const model::PriorSpec& prior);

/// sum_a int C(omega - f_a) q(a | omega) p(omega) d omega.
double continuous_cost(const reconstruct::ReconstructedProtocol& protocol, const model::PriorSpec& prior,
                       const model::CostModel& cost, QuadratureOptions opts = {});

/// Discretization gap of the estimate set F for costs with a curvature
/// bound b: max_j (b/8)(f_{j+1} - f_j)^2 plus the expected cost of the
/// prior mass outside [f_1, f_m]. None for the other costs.
std::optional<double> querier_gap(const model::PriorSpec& prior, const std::vector<double>& estimates,
                                  const model::CostModel& cost);

/// m equispaced estimates on [mu - w, mu + w] with w minimizing
/// querier_gap. Costs without a curvature bound get equal-quantile
/// placement P^{-1}((j + 1/2)/m) instead.
std::vector<double> choose_estimates(const model::PriorSpec& prior, const model::CostModel& cost, int m);

struct RunOptions {
  int jobs = 1;
  sdp::SolverOptions solver = sdp::SolverOptions::from_environment();
  QuadratureOptions quadrature;
};

/// Outcome of one discretization offset.
struct Sample {
  double offset = 0.0;
  bool ok = false;
  std::string error;              // set when the solve failed
  double discretized_cost = 0.0;  // SDP optimum
  double gap = 0.0;
  double feas = 0.0;
  std::optional<double> continuous_cost;
  std::optional<reconstruct::VerifyReport> verify;
};

struct LowerBound {
  double c_l = 0.0;
  double s_l = 0.0;
  std::vector<Sample> samples;
  std::vector<std::optional<program::InterrogationSolution>> solutions;
  int excluded = 0;
};

/// Solves the discretized problem at k seeded offsets. Failed solves are
/// recorded and left out of the mean. Requires k >= 2 and at least two
/// successful samples.
LowerBound lower_bound(const model::ClockScenario& scenario, int k, std::uint64_t seed, const RunOptions& opts = {});

struct BoundsReport {
  model::ClockScenario scenario;
  int k = 0;
  std::uint64_t seed = 0;
  double c_l = 0.0;
  double s_l = 0.0;
  double c_u = 0.0;
  std::optional<double> eps_q;
  int excluded = 0;
  std::vector<Sample> samples;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;

  /// Worst verify_protocol residual over all samples.
  [[nodiscard]] double max_verify_residual() const;
  [[nodiscard]] bool verified(double tol = 1e-5) const;
};

/// lower_bound, then reconstruction and continuous integration of every
/// per-offset solution; c_u is the smallest continuous cost.
BoundsReport bounds_report(const model::ClockScenario& scenario, int k, std::uint64_t seed,
                           const RunOptions& opts = {});

nlohmann::json to_json(const BoundsReport& report);

/// prior_sigma,N,t_f,d,m,k,c_l,s_l,c_u,eps_q,seed,wall_time_s
std::string csv_header();
std::string csv_row(const BoundsReport& report);

/// Runs f(i) for i in [0, n) on up to `jobs` threads. Exceptions are
/// rethrown on the caller, lowest index first.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

}  // namespace chronos::bounds
