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

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace chronos::cli {

/// One command's output. `body` always carries the configuration echo
/// under "config"; `verified` is false when any extracted protocol fails
/// verify_protocol at 1e-5.
struct Report {
  nlohmann::json body;
  bool verified = true;
  std::optional<std::string> csv_row;  // bounds only
};

/// Solves a single discretization (the configured offset, or the prior
/// itself when it is discrete) and reports the solution and its protocol.
Report cmd_solve(const RunConfig& config);

/// Full lower/upper bound procedure over config.k offsets.
Report cmd_bounds(const RunConfig& config, int jobs);

/// Estimate refinement on the configured discretization.
Report cmd_refine(const RunConfig& config);

/// Classical chain of config.stages interrogations on the configured
/// discretization. With config.compare, also averages one-query, chained
/// and coherent costs over config.k offsets.
Report cmd_chain(const RunConfig& config, int jobs);

/// Discretized prior a single-offset command works on.
model::DiscretizedPrior discretization(const RunConfig& config);

}  // namespace chronos::cli
