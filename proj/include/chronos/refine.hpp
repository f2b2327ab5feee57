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
#include <vector>

#include <nlohmann/json.hpp>

#include "chronos/bounds.hpp"

namespace chronos::refine {

struct RefineResult {
  std::vector<double> estimates;  // F*, sorted, near-duplicates merged
  program::InterrogationSolution solution;
  int iterations = 0;  // number of SDP solves
  std::vector<double> cost_history;
};

/// Alternates solving with replacing every used estimate by the Bayes
/// statistic of its posterior. Outcomes with tr(sigma_a) < 1e-10 keep their
/// estimate, and estimates closer than 10 tol are merged. Throws
/// NonDecreasingCost if the cost rises by more than 1e-6 between iterations.
RefineResult refine_estimates(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario,
                              int max_iter = 50, double tol = 1e-6,
                              const sdp::SolverOptions& opts = sdp::SolverOptions::from_environment());

/// Branch probabilities below this are not expanded further.
inline constexpr double kPruneProbability = 1e-9;

struct ChainNode {
  int stage = 0;
  std::vector<int> path;  // outcomes of the earlier stages
  model::DiscretizedPrior prior;
  std::optional<program::InterrogationSolution> solution;  // empty for pruned nodes
  double probability = 1.0;
  int parent = -1;
  std::vector<int> children;  // indexed by outcome, -1 where not expanded
};

struct ChainResult {
  double total_cost = 0.0;
  std::vector<ChainNode> nodes;  // nodes[0] is the root
  double pruned_mass = 0.0;
  int solves = 0;
};

/// Runs the interrogation of stage s on the posterior left by the outcomes
/// of stages 0..s-1, all on the support of dp. `scenarios` holds one entry
/// per stage, or a single entry reused for every stage. Pruned branches are
/// charged the conditional cost of the estimate their parent reported.
ChainResult classical_chain(const model::DiscretizedPrior& dp, const std::vector<model::ClockScenario>& scenarios,
                            int stages, const bounds::RunOptions& opts = {});

/// Expected continuous cost of the chained protocol: every expanded node is
/// reconstructed and the stages are composed through their outcome
/// distributions.
double chain_continuous_cost(const ChainResult& chain, const model::PriorSpec& prior, const model::CostModel& cost,
                             bounds::QuadratureOptions opts = {});

nlohmann::json to_json(const RefineResult& result);
/// Totals plus one summary entry per node.
nlohmann::json to_json(const ChainResult& chain);

}  // namespace chronos::refine
