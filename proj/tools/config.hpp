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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chronos/model.hpp"
#include "chronos/sdp.hpp"

// Run configuration documents. See docs/config.md for the schema.
namespace chronos::cli {

struct RunConfig {
  std::string label;
  model::ClockScenario scenario;  // estimates resolved to an explicit list
  nlohmann::json estimates_spec;  // as written in the document
  std::optional<double> offset;   // empty means the midpoint 1/(2d)
  std::uint64_t seed = 1;
  int k = 100;
  int stages = 2;
  int max_iter = 50;
  double refine_tol = 1e-6;
  bool refine = false;
  bool compare = false;
  sdp::SolverOptions solver = sdp::SolverOptions::from_environment();

  [[nodiscard]] double resolved_offset() const { return offset.value_or(0.5 / scenario.d); }
};

/// Validates one configuration object. Unknown keys, wrong types and
/// out-of-range values raise ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

/// A document is either one configuration object or an array of them.
std::vector<RunConfig> parse_document(const nlohmann::json& doc);

/// Canonical form of a configuration; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

/// Built-in experiment presets as configuration documents.
std::vector<std::string> preset_names();
nlohmann::json preset(const std::string& name);

/// Command-line overrides applied to every configuration of a document.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  std::optional<int> d;
};

nlohmann::json apply_overrides(nlohmann::json doc, const Overrides& o);

}  // namespace chronos::cli
