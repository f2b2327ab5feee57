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

#include "chronos/refine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace chronos::refine {

using herm::RealVector;

namespace {

constexpr double kUnusedTrace = 1e-10;

const model::ClockScenario& stage_scenario(const std::vector<model::ClockScenario>& s, int stage) {
  return s.size() == 1 ? s.front() : s[static_cast<std::size_t>(stage)];
}

// Unnormalized cost of reporting f_a on outcome a: tr(A_a sigma_a).
double branch_cost(const program::InterrogationSolution& sol, int a) {
  const auto& sigma = sol.sigma[static_cast<std::size_t>(a)];
  double c = 0.0;
  for (int x = 0; x < sol.d(); ++x)
    c += sol.cost_model.value(sol.prior.omegas(x) - sol.estimates[static_cast<std::size_t>(a)]) * sigma(x, x).real();
  return c;
}

model::DiscretizedPrior conditional_prior(const program::InterrogationSolution& sol, int a) {
  const auto& sigma = sol.sigma[static_cast<std::size_t>(a)];
  model::DiscretizedPrior dp;
  dp.omegas = sol.prior.omegas;
  dp.weights = sigma.diagonal().real().cwiseMax(0.0);
  dp.weights /= dp.weights.sum();
  return dp;
}

}  // namespace

RefineResult refine_estimates(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario, int max_iter,
                              double tol, const sdp::SolverOptions& opts) {
  if (max_iter < 1) throw DomainError("refine_estimates needs max_iter >= 1");
  auto sc = scenario;
  RefineResult r;
  r.solution = program::solve_interrogation(dp, sc, opts);
  r.iterations = 1;
  r.cost_history.push_back(r.solution.cost);
  while (true) {
    const auto& sol = r.solution;
    std::vector<double> next = sc.estimates;
    double delta = 0.0;
    for (int a = 0; a < sol.outcomes(); ++a) {
      const RealVector w = sol.sigma[static_cast<std::size_t>(a)].diagonal().real().cwiseMax(0.0);
      if (w.sum() < kUnusedTrace) continue;
      const double stat = model::bayes_estimate(sc.cost, dp.omegas, w);
      delta = std::max(delta, std::abs(stat - next[static_cast<std::size_t>(a)]));
      next[static_cast<std::size_t>(a)] = stat;
    }
    if (delta < tol || r.iterations >= max_iter) break;
    // Relabelling outcomes is free, and outcomes whose estimates agree to
    // within 10 tol are merged. The solver's central path splits mass evenly
    // across duplicates, so without merging they never separate.
    std::sort(next.begin(), next.end());
    const double merge = std::max(10.0 * tol, 1e-12);
    next.erase(std::unique(next.begin(), next.end(), [&](double x, double y) { return std::abs(x - y) <= merge; }),
               next.end());
    sc.estimates = next;
    auto updated = program::solve_interrogation(dp, sc, opts);
    ++r.iterations;
    if (updated.cost > sol.cost + 1e-6) {
      std::ostringstream msg;
      msg << "refinement raised the cost from " << sol.cost << " to " << updated.cost;
      throw NonDecreasingCost(msg.str());
    }
    r.cost_history.push_back(updated.cost);
    r.solution = std::move(updated);
  }
  r.estimates = sc.estimates;
  return r;
}

ChainResult classical_chain(const model::DiscretizedPrior& dp, const std::vector<model::ClockScenario>& scenarios,
                            int stages, const bounds::RunOptions& opts) {
  if (stages < 1) throw DomainError("classical_chain needs at least one stage");
  if (scenarios.size() != 1 && scenarios.size() != static_cast<std::size_t>(stages))
    throw DimensionMismatch("classical_chain needs one scenario or one per stage");
  ChainResult chain;
  chain.nodes.push_back(ChainNode{0, {}, dp, std::nullopt, 1.0, -1, {}});
  std::vector<int> level{0};
  for (int s = 0; s < stages; ++s) {
    const auto& sc = stage_scenario(scenarios, s);
    bounds::parallel_for(static_cast<int>(level.size()), opts.jobs, [&](int i) {
      auto& node = chain.nodes[static_cast<std::size_t>(level[static_cast<std::size_t>(i)])];
      node.solution = program::solve_interrogation(node.prior, sc, opts.solver);
    });
    chain.solves += static_cast<int>(level.size());
    if (s + 1 == stages) {
      for (int id : level) {
        const auto& node = chain.nodes[static_cast<std::size_t>(id)];
        chain.total_cost += node.probability * node.solution->cost;
      }
      break;
    }
    std::vector<int> next;
    for (int id : level) {
      const auto sol = *chain.nodes[static_cast<std::size_t>(id)].solution;
      const double prob = chain.nodes[static_cast<std::size_t>(id)].probability;
      for (int a = 0; a < sol.outcomes(); ++a) {
        ChainNode child;
        child.stage = s + 1;
        child.path = chain.nodes[static_cast<std::size_t>(id)].path;
        child.path.push_back(a);
        child.parent = id;
        const double pa = std::max(0.0, sol.sigma[static_cast<std::size_t>(a)].trace().real());
        child.probability = prob * pa;
        const int cid = static_cast<int>(chain.nodes.size());
        if (child.probability < kPruneProbability) {
          chain.pruned_mass += child.probability;
          chain.total_cost += prob * branch_cost(sol, a);
        } else {
          child.prior = conditional_prior(sol, a);
          next.push_back(cid);
        }
        chain.nodes[static_cast<std::size_t>(id)].children.push_back(cid);
        chain.nodes.push_back(std::move(child));
      }
    }
    level = std::move(next);
  }
  return chain;
}

double chain_continuous_cost(const ChainResult& chain, const model::PriorSpec& prior, const model::CostModel& cost,
                             bounds::QuadratureOptions opts) {
  const auto n = static_cast<int>(chain.nodes.size());
  std::vector<std::optional<reconstruct::ReconstructedProtocol>> protocols(static_cast<std::size_t>(n));
  // The composed outcome probabilities are trigonometric polynomials whose
  // degree adds up over the stages.
  std::vector<int> stage_degree;
  for (int i = 0; i < n; ++i) {
    const auto& node = chain.nodes[static_cast<std::size_t>(i)];
    if (!node.solution) continue;
    stage_degree.resize(std::max(stage_degree.size(), static_cast<std::size_t>(node.stage + 1)), 0);
    auto& deg = stage_degree[static_cast<std::size_t>(node.stage)];
    deg = std::max(deg, node.solution->atoms * node.solution->queries);
    protocols[static_cast<std::size_t>(i)] = reconstruct::reconstruct_protocol(*node.solution);
  }
  int degree = 0;
  for (int d : stage_degree) degree += d;
  // Expected cost at omega of the sub-chain rooted at node id.
  std::function<double(int, double)> value = [&](int id, double w) {
    const auto& node = chain.nodes[static_cast<std::size_t>(id)];
    const auto& p = *protocols[static_cast<std::size_t>(id)];
    const RealVector q = reconstruct::simulate(p, w);
    double s = 0.0;
    for (int a = 0; a < q.size(); ++a) {
      const int child = node.children.empty() ? -1 : node.children[static_cast<std::size_t>(a)];
      const bool expanded = child >= 0 && chain.nodes[static_cast<std::size_t>(child)].solution;
      s += q(a) * (expanded ? value(child, w) : cost.value(w - p.estimates[static_cast<std::size_t>(a)]));
    }
    return s;
  };
  if (opts.max_panel_width <= 0.0) opts.max_panel_width = std::numbers::pi / (4.0 * std::max(1, degree));
  const auto [lo, hi] = bounds::integration_range(prior);
  return bounds::integrate([&](double w) { return value(0, w) * model::prior_pdf(prior, w); }, lo, hi, opts);
}

nlohmann::json to_json(const RefineResult& r) {
  nlohmann::json j;
  j["estimates"] = r.estimates;
  j["iterations"] = r.iterations;
  j["cost_history"] = r.cost_history;
  j["cost"] = r.solution.cost;
  std::vector<double> probs;
  for (const auto& s : r.solution.sigma) probs.push_back(s.trace().real());
  j["outcome_probabilities"] = probs;
  return j;
}

nlohmann::json to_json(const ChainResult& chain) {
  nlohmann::json j;
  j["total_cost"] = chain.total_cost;
  j["pruned_mass"] = chain.pruned_mass;
  j["solves"] = chain.solves;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& node : chain.nodes) {
    nlohmann::json e{{"stage", node.stage}, {"path", node.path}, {"probability", node.probability},
                     {"parent", node.parent}};
    if (node.solution) {
      e["cost"] = node.solution->cost;
      e["estimates"] = node.solution->estimates;
    } else {
      e["pruned"] = true;
    }
    nodes.push_back(std::move(e));
  }
  return j;
}

}  // namespace chronos::refine
