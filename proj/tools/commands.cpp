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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <algorithm>

#include "chronos/bounds.hpp"
#include "chronos/refine.hpp"

namespace chronos::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> to_vector(const herm::RealVector& v) { return {v.data(), v.data() + v.size()}; }

json solution_json(const program::InterrogationSolution& sol) {
  const auto post = program::posteriors(sol);
  json rows = json::array();
  for (int a = 0; a < sol.outcomes(); ++a) rows.push_back(to_vector(post.posterior.row(a).transpose()));
  return {{"cost", sol.cost},
          {"gap", sol.gap},
          {"feas", sol.feas},
          {"iterations", sol.iterations},
          {"status", sdp::to_string(sol.status)},
          {"omegas", to_vector(sol.prior.omegas)},
          {"weights", to_vector(sol.prior.weights)},
          {"estimates", sol.estimates},
          {"outcome_probabilities", to_vector(post.outcome_probs)},
          {"posteriors", rows}};
}

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return s;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return s;
}

json stats_json(const std::vector<double>& v) {
  const auto s = stats(v);
  return {{"mean", s.mean}, {"se", s.se}, {"samples", v}};
}

// One-query, chained and coherent costs on a shared set of offsets.
json compare_chain(const RunConfig& c, int jobs, bool& verified) {
  const int k = c.k;
  const auto offsets = bounds::draw_offsets(c.scenario.d, k, c.seed);
  auto coherent_sc = c.scenario;
  coherent_sc.queries = c.scenario.queries * c.stages;
  std::vector<double> single(k), chained(k), coherent(k);
  std::vector<double> single_up(k), chained_up(k), coherent_up(k);
  std::vector<double> worst(k, 0.0);
  bounds::parallel_for(k, jobs, [&](int j) {
    const auto i = static_cast<std::size_t>(j);
    const auto dp = bounds::discretize_prior(c.scenario.prior, c.scenario.d, offsets[i], c.scenario.wrap_phase);
    auto one_sc = c.scenario;
    auto two_sc = coherent_sc;
    program::InterrogationSolution one, two;
    if (c.refine) {
      auto r1 = refine::refine_estimates(dp, one_sc, c.max_iter, c.refine_tol, c.solver);
      auto r2 = refine::refine_estimates(dp, two_sc, c.max_iter, c.refine_tol, c.solver);
      one_sc.estimates = r1.estimates;
      two_sc.estimates = r2.estimates;
      one = std::move(r1.solution);
      two = std::move(r2.solution);
    } else {
      one = program::solve_interrogation(dp, one_sc, c.solver);
      two = program::solve_interrogation(dp, two_sc, c.solver);
    }
    bounds::RunOptions serial;
    serial.solver = c.solver;
    const auto chain = refine::classical_chain(dp, {one_sc}, c.stages, serial);
    single[i] = one.cost;
    coherent[i] = two.cost;
    chained[i] = chain.total_cost;
    const auto p1 = reconstruct::reconstruct_protocol(one);
    const auto p2 = reconstruct::reconstruct_protocol(two);
    worst[i] = std::max(reconstruct::worst_residual(reconstruct::verify_protocol(p1, one)),
                        reconstruct::worst_residual(reconstruct::verify_protocol(p2, two)));
    single_up[i] = bounds::continuous_cost(p1, c.scenario.prior, c.scenario.cost);
    coherent_up[i] = bounds::continuous_cost(p2, c.scenario.prior, c.scenario.cost);
    chained_up[i] = refine::chain_continuous_cost(chain, c.scenario.prior, c.scenario.cost);
  });
  double max_resid = 0.0;
  for (double w : worst) max_resid = std::max(max_resid, w);
  verified = max_resid <= 1e-5;
  std::vector<double> d1(k), d2(k);
  for (int j = 0; j < k; ++j) {
    d1[static_cast<std::size_t>(j)] = single[static_cast<std::size_t>(j)] - chained[static_cast<std::size_t>(j)];
    d2[static_cast<std::size_t>(j)] = chained[static_cast<std::size_t>(j)] - coherent[static_cast<std::size_t>(j)];
  }
  const auto min_of = [](const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); };
  return {{"offsets", offsets},
          {"single", stats_json(single)},
          {"chained", stats_json(chained)},
          {"coherent", stats_json(coherent)},
          {"single_minus_chained", stats_json(d1)},
          {"chained_minus_coherent", stats_json(d2)},
          {"c_u", {{"single", min_of(single_up)}, {"chained", min_of(chained_up)}, {"coherent", min_of(coherent_up)}}},
          {"max_verify_residual", max_resid}};
}

}  // namespace

model::DiscretizedPrior discretization(const RunConfig& c) {
  if (!c.scenario.prior.continuous()) return model::as_discretized(c.scenario.prior);
  return bounds::discretize_prior(c.scenario.prior, c.scenario.d, c.resolved_offset(), c.scenario.wrap_phase);
}

Report cmd_solve(const RunConfig& c) {
  const auto start = Clock::now();
  const auto dp = discretization(c);
  const auto sol = program::solve_interrogation(dp, c.scenario, c.solver);
  const auto protocol = reconstruct::reconstruct_protocol(sol);
  const auto verify = reconstruct::verify_protocol(protocol, sol);
  Report r;
  r.verified = verify.passing();
  r.body = solution_json(sol);
  r.body["config"] = to_json(c);
  if (c.scenario.prior.continuous()) r.body["offset"] = c.resolved_offset();
  r.body["dicke_amplitudes"] = to_vector(reconstruct::dicke_amplitudes(protocol));
  r.body["verify"] = reconstruct::to_json(verify);
  r.body["protocol"] = reconstruct::to_json(protocol);
  r.body["wall_time_s"] = seconds_since(start);
  return r;
}

Report cmd_bounds(const RunConfig& c, int jobs) {
  bounds::RunOptions opts;
  opts.jobs = jobs;
  opts.solver = c.solver;
  const auto report = bounds::bounds_report(c.scenario, c.k, c.seed, opts);
  Report r;
  r.verified = report.verified();
  r.body = bounds::to_json(report);
  r.body["config"] = to_json(c);
  r.csv_row = bounds::csv_row(report);
  return r;
}

Report cmd_refine(const RunConfig& c) {
  const auto start = Clock::now();
  const auto dp = discretization(c);
  const auto result = refine::refine_estimates(dp, c.scenario, c.max_iter, c.refine_tol, c.solver);
  const auto protocol = reconstruct::reconstruct_protocol(result.solution);
  const auto verify = reconstruct::verify_protocol(protocol, result.solution);
  Report r;
  r.verified = verify.passing();
  r.body = refine::to_json(result);
  r.body["config"] = to_json(c);
  r.body["verify"] = reconstruct::to_json(verify);
  r.body["wall_time_s"] = seconds_since(start);
  return r;
}

Report cmd_chain(const RunConfig& c, int jobs) {
  const auto start = Clock::now();
  bounds::RunOptions opts;
  opts.jobs = jobs;
  opts.solver = c.solver;
  const auto chain = refine::classical_chain(discretization(c), {c.scenario}, c.stages, opts);
  Report r;
  r.body = refine::to_json(chain);
  r.body["config"] = to_json(c);
  if (c.compare) {
    if (!c.scenario.prior.continuous()) throw ConfigError("compare needs a continuous prior");
    bool verified = true;
    r.body["comparison"] = compare_chain(c, jobs, verified);
    r.verified = verified;
  }
  r.body["wall_time_s"] = seconds_since(start);
  return r;
}

}  // namespace chronos::cli
