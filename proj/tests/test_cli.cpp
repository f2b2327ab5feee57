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

#include <cmath>
#include <numbers>

#include "doctest.h"

#include "chronos/errors.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace chronos;
using namespace chronos::cli;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json orthogonal() {
  return {{"label", "orthogonal"},
          {"atoms", 1},
          {"prior", {{"kind", "discrete"}, {"params", {{"points", {-kPi / 2, kPi / 2}}, {"weights", {0.5, 0.5}}}}}},
          {"cost", "quadratic"},
          {"estimates", {-kPi / 2, kPi / 2}}};
}

json small_gaussian() {
  return {{"label", "small"},
          {"atoms", 1},
          {"prior", {{"kind", "gaussian"}, {"params", {{"mean", 0.0}, {"stddev", 1.0}}}}},
          {"cost", "quadratic"},
          {"d", 7},
          {"estimates", {{"count", 7}, {"method", "optimal"}}},
          {"k", 6},
          {"seed", 11}};
}

}  // namespace

TEST_CASE("unknown and malformed keys are rejected") {
  auto doc = small_gaussian();
  doc["atom"] = 2;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = small_gaussian();
  doc["prior"]["params"]["sigma"] = 1.0;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = small_gaussian();
  doc["d"] = "fifteen";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = small_gaussian();
  doc["estimates"] = {0.5, -0.5};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = small_gaussian();
  doc["wrap_phase"] = true;  // only meaningful for the periodic cost
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  CHECK_THROWS_AS(preset("tableIII"), ConfigError);
}

TEST_CASE("every preset parses") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto configs = parse_document(preset(name));
    CHECK(!configs.empty());
    for (const auto& c : configs) CHECK(c.scenario.estimates.size() >= 2);
  }
  CHECK(parse_document(preset("tableI")).size() == 5);
  CHECK(parse_document(preset("tableII")).size() == 8);
  CHECK(parse_document(preset("fig6")).size() == 5);
  const auto fig4 = parse_config(preset("fig4"));
  CHECK(fig4.compare);
  CHECK(fig4.stages == 2);
}

TEST_CASE("configuration echo round-trips") {
  for (const auto& name : preset_names())
    for (const auto& c : parse_document(preset(name))) {
      const json echo = to_json(c);
      CHECK(to_json(parse_config(echo)) == echo);
    }
}

TEST_CASE("overrides reach every configuration") {
  const auto doc = apply_overrides(preset("fig6"), Overrides{7, 3, 9});
  for (const auto& c : parse_document(doc)) {
    CHECK(c.seed == 7);
    CHECK(c.k == 3);
    CHECK(c.scenario.d == 9);
  }
}

TEST_CASE("solve on orthogonal conditional states costs nothing") {
  const auto r = cmd_solve(parse_config(orthogonal()));
  CHECK(r.verified);
  CHECK(r.body["cost"].get<double>() <= 1e-7);
  CHECK(r.body["config"] == to_json(parse_config(orthogonal())));
  CHECK(r.body["verify"]["marginal"].get<double>() <= 1e-5);
  CHECK(r.body["dicke_amplitudes"].size() == 2);
}

TEST_CASE("one-stage chain matches solve exactly") {
  auto doc = small_gaussian();
  doc["stages"] = 1;
  const auto c = parse_config(doc);
  const auto chain = cmd_chain(c, 1);
  const auto solve = cmd_solve(c);
  CHECK(chain.body["total_cost"].get<double>() == solve.body["cost"].get<double>());
}

TEST_CASE("refine reports its iterations and final estimates") {
  const auto r = cmd_refine(parse_config(small_gaussian()));
  CHECK(r.verified);
  CHECK(r.body["iterations"].get<int>() >= 1);
  CHECK(!r.body["estimates"].empty());
  CHECK(r.body["cost_history"].size() == r.body["iterations"].get<std::size_t>());
}

TEST_CASE("bounds rerun from the echo reproduces the numbers") {
  const auto first = cmd_bounds(parse_config(small_gaussian()), 2);
  REQUIRE(first.csv_row);
  const auto again = cmd_bounds(parse_config(first.body["config"]), 1);
  for (const char* key : {"c_l", "s_l", "c_u", "eps_q"})
    CHECK(std::abs(first.body[key].get<double>() - again.body[key].get<double>()) <= 1e-7);
  // Everything but the trailing wall time.
  const auto stem = [](const std::string& row) { return row.substr(0, row.rfind(',')); };
  CHECK(stem(*first.csv_row) == stem(*again.csv_row));
}

TEST_CASE("compare needs a continuous prior") {
  auto doc = orthogonal();
  doc["compare"] = true;
  CHECK_THROWS_AS(cmd_chain(parse_config(doc), 1), ConfigError);
}
