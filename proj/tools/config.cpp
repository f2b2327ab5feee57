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

#include "config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "chronos/bounds.hpp"

namespace chronos::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + " is missing '" + key + "'");
  if (!obj[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

int integer(const json& v, const std::string& name, int min) {
  if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
  const auto x = v.get<long long>();
  if (x < min || x > 1000000) throw ConfigError(name + " out of range");
  return static_cast<int>(x);
}

bool boolean(const json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError(name + " must be true or false");
  return v.get<bool>();
}

std::vector<double> numbers(const json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError(name + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(name + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

model::PriorSpec parse_prior(const json& p) {
  check_keys(p, "prior", {"kind", "params"});
  if (!p.contains("kind") || !p["kind"].is_string()) throw ConfigError("prior.kind must be a string");
  const json params = p.value("params", json::object());
  const auto kind = p["kind"].get<std::string>();
  if (kind == "gaussian") {
    check_keys(params, "prior.params", {"mean", "stddev"});
    return model::PriorSpec::gaussian(params.contains("mean") ? number(params, "mean", "prior.params") : 0.0,
                                      number(params, "stddev", "prior.params"));
  }
  if (kind == "uniform") {
    check_keys(params, "prior.params", {"lo", "hi"});
    return model::PriorSpec::uniform(number(params, "lo", "prior.params"), number(params, "hi", "prior.params"));
  }
  if (kind == "discrete") {
    check_keys(params, "prior.params", {"points", "weights"});
    if (!params.contains("points") || !params.contains("weights"))
      throw ConfigError("discrete prior needs points and weights");
    return model::PriorSpec::discrete(numbers(params["points"], "prior.params.points"),
                                      numbers(params["weights"], "prior.params.weights"));
  }
  throw ConfigError("unknown prior kind '" + kind + "'");
}

std::vector<double> resolve_estimates(const json& spec, const model::PriorSpec& prior, const model::CostModel& cost) {
  if (spec.is_array()) return numbers(spec, "estimates");
  check_keys(spec, "estimates", {"count", "method", "lo", "hi"});
  if (!spec.contains("count")) throw ConfigError("estimates is missing 'count'");
  const int m = integer(spec["count"], "estimates.count", 1);
  const auto method = spec.value("method", std::string("optimal"));
  if (method == "linspace") {
    const double lo = number(spec, "lo", "estimates");
    const double hi = number(spec, "hi", "estimates");
    if (m == 1) return {0.5 * (lo + hi)};
    std::vector<double> f(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) f[static_cast<std::size_t>(j)] = lo + (hi - lo) * j / (m - 1);
    return f;
  }
  if (spec.contains("lo") || spec.contains("hi")) throw ConfigError("estimates.lo/hi only apply to linspace");
  if (!prior.continuous()) throw ConfigError("estimates method '" + method + "' needs a continuous prior");
  if (method == "optimal") {
    if (m < 2) throw ConfigError("estimates.count must be at least 2");
    return bounds::choose_estimates(prior, cost, m);
  }
  if (method == "quantile") {
    std::vector<double> f(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) f[static_cast<std::size_t>(j)] = model::prior_invcdf(prior, (j + 0.5) / m);
    return f;
  }
  throw ConfigError("unknown estimates method '" + method + "'");
}

json gaussian(double stddev) { return {{"kind", "gaussian"}, {"params", {{"mean", 0.0}, {"stddev", stddev}}}}; }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

RunConfig parse_config(const json& doc) {
  check_keys(doc, "config",
             {"label", "atoms", "queries", "prior", "cost", "d", "estimates", "offset", "seed", "k", "stages",
              "max_iter", "refine_tol", "refine", "compare", "wrap_phase", "tolerances"});
  RunConfig c;
  try {
    if (doc.contains("label")) {
      if (!doc["label"].is_string()) throw ConfigError("label must be a string");
      c.label = doc["label"].get<std::string>();
    }
    auto& sc = c.scenario;
    if (doc.contains("atoms")) sc.atoms = integer(doc["atoms"], "atoms", 1);
    if (doc.contains("queries")) sc.queries = integer(doc["queries"], "queries", 1);
    if (!doc.contains("prior")) throw ConfigError("config is missing 'prior'");
    sc.prior = parse_prior(doc["prior"]);
    if (doc.contains("cost")) {
      if (!doc["cost"].is_string()) throw ConfigError("cost must be a string");
      sc.cost = model::CostModel{model::cost_kind_from_string(doc["cost"].get<std::string>())};
    }
    if (doc.contains("d")) sc.d = integer(doc["d"], "d", 2);
    if (!sc.prior.continuous()) sc.d = static_cast<int>(sc.prior.points.size());
    if (doc.contains("wrap_phase")) sc.wrap_phase = boolean(doc["wrap_phase"], "wrap_phase");
    c.estimates_spec = doc.value("estimates", json{{"count", 25}, {"method", "optimal"}});
    sc.estimates = resolve_estimates(c.estimates_spec, sc.prior, sc.cost);
    if (doc.contains("offset")) {
      const auto& o = doc["offset"];
      if (o.is_string() && o.get<std::string>() == "midpoint") {
        c.offset.reset();
      } else if (o.is_number()) {
        c.offset = o.get<double>();
        if (!(*c.offset > 0.0 && *c.offset < 1.0 / sc.d)) throw ConfigError("offset must lie in (0, 1/d)");
      } else {
        throw ConfigError("offset must be a number or \"midpoint\"");
      }
    }
    if (doc.contains("seed")) {
      const auto& s = doc["seed"];
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
        throw ConfigError("seed must be a non-negative integer");
      c.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("k")) c.k = integer(doc["k"], "k", 2);
    if (doc.contains("stages")) c.stages = integer(doc["stages"], "stages", 1);
    if (doc.contains("max_iter")) c.max_iter = integer(doc["max_iter"], "max_iter", 1);
    if (doc.contains("refine_tol")) {
      if (!doc["refine_tol"].is_number() || !(doc["refine_tol"].get<double>() > 0.0))
        throw ConfigError("refine_tol must be a positive number");
      c.refine_tol = doc["refine_tol"].get<double>();
    }
    if (doc.contains("refine")) c.refine = boolean(doc["refine"], "refine");
    if (doc.contains("compare")) c.compare = boolean(doc["compare"], "compare");
    if (doc.contains("tolerances")) {
      const auto& t = doc["tolerances"];
      check_keys(t, "tolerances", {"gap", "feas", "max_iter"});
      if (t.contains("gap")) c.solver.gap_tol = number(t, "gap", "tolerances");
      if (t.contains("feas")) c.solver.feas_tol = number(t, "feas", "tolerances");
      if (t.contains("max_iter")) c.solver.max_iter = integer(t["max_iter"], "tolerances.max_iter", 1);
      if (!(c.solver.gap_tol > 0.0 && c.solver.feas_tol > 0.0)) throw ConfigError("tolerances must be positive");
    }
    sc.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  if (c.label.empty()) {
    c.label = "N" + std::to_string(c.scenario.atoms) + "-t" + std::to_string(c.scenario.queries);
  }
  return c;
}

std::vector<RunConfig> parse_document(const json& doc) {
  std::vector<RunConfig> out;
  if (doc.is_array()) {
    if (doc.empty()) throw ConfigError("configuration array is empty");
    for (const auto& d : doc) out.push_back(parse_config(d));
  } else {
    out.push_back(parse_config(doc));
  }
  return out;
}

json to_json(const RunConfig& c) {
  json j = model::to_json(c.scenario);
  j["label"] = c.label;
  j["offset"] = c.offset ? json(*c.offset) : json("midpoint");
  j["seed"] = c.seed;
  j["k"] = c.k;
  j["stages"] = c.stages;
  j["max_iter"] = c.max_iter;
  j["refine_tol"] = c.refine_tol;
  j["refine"] = c.refine;
  j["compare"] = c.compare;
  j["tolerances"] = {{"gap", c.solver.gap_tol}, {"feas", c.solver.feas_tol}, {"max_iter", c.solver.max_iter}};
  return j;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names{"tableI", "tableII", "fig2", "fig4", "fig6"};
  for (int t = 1; t <= 2; ++t)
    for (int n = 1; n <= 4; ++n) names.push_back("tableII-" + std::to_string(n) + "-" + std::to_string(t));
  return names;
}

json preset(const std::string& name) {
  const auto table_ii_row = [](int n, int t) {
    return json{{"label", "tableII-" + std::to_string(n) + "-" + std::to_string(t)},
                {"atoms", n},
                {"queries", t},
                {"prior", gaussian(1.0)},
                {"cost", "quadratic"},
                {"d", 15},
                {"estimates", {{"count", 25}, {"method", "optimal"}}},
                {"k", 100},
                {"seed", 2026}};
  };
  if (name == "tableI") {
    json runs = json::array();
    for (double s : {0.25, 0.75, 1.25, 1.75, 2.25})
      runs.push_back({{"label", "tableI-s" + fmt(s)},
                      {"atoms", 2},
                      {"prior", gaussian(s)},
                      {"cost", "periodic"},
                      {"d", 15},
                      {"estimates", {{"count", 20}, {"method", "quantile"}}},
                      {"wrap_phase", true},
                      {"offset", "midpoint"},
                      {"k", 100},
                      {"seed", 2026}});
    return runs;
  }
  if (name == "tableII") {
    json runs = json::array();
    for (int t = 1; t <= 2; ++t)
      for (int n = 1; n <= 4; ++n) runs.push_back(table_ii_row(n, t));
    return runs;
  }
  if (name.starts_with("tableII-") && name.size() == 11) {
    const int n = name[8] - '0';
    const int t = name[10] - '0';
    if (n >= 1 && n <= 4 && t >= 1 && t <= 2 && name[9] == '-') return table_ii_row(n, t);
  }
  if (name == "fig2") {
    json runs = json::array();
    for (int n = 1; n <= 2; ++n)
      for (int i = 1; i <= 9; ++i) {
        const double s = 0.25 * i;
        runs.push_back({{"label", "fig2-N" + std::to_string(n) + "-s" + fmt(s)},
                        {"atoms", n},
                        {"prior", gaussian(s)},
                        {"cost", "periodic"},
                        {"d", 15},
                        {"estimates", {{"count", 20}, {"method", "quantile"}}},
                        {"wrap_phase", true},
                        {"k", 100},
                        {"seed", 2026}});
      }
    return runs;
  }
  if (name == "fig4") {
    return {{"label", "fig4"},
            {"atoms", 2},
            {"prior", gaussian(1.0)},
            {"cost", "quadratic"},
            {"d", 15},
            {"estimates", {{"count", 25}, {"method", "optimal"}}},
            {"stages", 2},
            {"compare", true},
            {"refine", true},
            {"k", 20},
            {"seed", 2026}};
  }
  if (name == "fig6") {
    json runs = json::array();
    for (int d : {7, 11, 15, 21, 31})
      runs.push_back({{"label", "fig6-d" + std::to_string(d)},
                      {"atoms", 4},
                      {"prior", gaussian(1.875)},
                      {"cost", "quadratic"},
                      {"d", d},
                      {"estimates", {{"count", 20}, {"method", "optimal"}}},
                      {"k", 100},
                      {"seed", 2026}});
    return runs;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

json apply_overrides(json doc, const Overrides& o) {
  const auto apply = [&](json& c) {
    if (o.seed) c["seed"] = *o.seed;
    if (o.k) c["k"] = *o.k;
    if (o.d) c["d"] = *o.d;
  };
  if (doc.is_array()) {
    for (auto& c : doc) apply(c);
  } else {
    apply(doc);
  }
  return doc;
}

}  // namespace chronos::cli
