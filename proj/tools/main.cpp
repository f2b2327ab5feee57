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

#include <CLI11.hpp>

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "chronos/bounds.hpp"
#include "chronos/errors.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using chronos::cli::Report;
using chronos::cli::RunConfig;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kNumerical = 3, kUnverified = 4 };

struct Options {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  std::optional<int> d;
  int jobs = 0;
  std::string out = "results";
};

nlohmann::json load_document(const Options& o) {
  if (!o.preset.empty()) return chronos::cli::preset(o.preset);
  std::ifstream in(o.config_path);
  if (!in) throw chronos::ConfigError("cannot open " + o.config_path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw chronos::ConfigError(o.config_path + ": " + e.what());
  }
}

std::string file_stem(const std::string& command, const RunConfig& c, std::size_t index) {
  std::string name = c.label.empty() ? std::to_string(index) : c.label;
  for (char& ch : name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') ch = '_';
  return command + "_" + name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw chronos::ConfigError("cannot write " + path.string());
  out << text;
}

void summarize(const std::string& command, const RunConfig& c, const Report& r) {
  const auto& b = r.body;
  std::cout << command << " " << (c.label.empty() ? "-" : c.label);
  if (command == "bounds") {
    std::cout << "  c_l=" << b["c_l"].get<double>() << " s_l=" << b["s_l"].get<double>()
              << " c_u=" << b["c_u"].get<double>();
    if (!b["eps_q"].is_null()) std::cout << " eps_q=" << b["eps_q"].get<double>();
  } else if (command == "chain") {
    std::cout << "  total=" << b["total_cost"].get<double>();
    if (b.contains("comparison")) {
      const auto& cmp = b["comparison"];
      std::cout << " single=" << cmp["single"]["mean"].get<double>()
                << " chained=" << cmp["chained"]["mean"].get<double>()
                << " coherent=" << cmp["coherent"]["mean"].get<double>();
    }
  } else {
    std::cout << "  cost=" << b["cost"].get<double>();
  }
  std::cout << (r.verified ? "" : "  [verification failed]") << "\n";
}

int run(const std::string& command, const Options& o) {
  const chronos::cli::Overrides overrides{o.seed, o.k, o.d};
  const auto configs = chronos::cli::parse_document(chronos::cli::apply_overrides(load_document(o), overrides));
  const int jobs = o.jobs > 0 ? o.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  fs::create_directories(o.out);

  bool all_verified = true;
  std::string csv;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    Report r;
    if (command == "solve") {
      r = chronos::cli::cmd_solve(c);
    } else if (command == "bounds") {
      r = chronos::cli::cmd_bounds(c, jobs);
    } else if (command == "refine") {
      r = chronos::cli::cmd_refine(c);
    } else {
      r = chronos::cli::cmd_chain(c, jobs);
    }
    write_text(fs::path(o.out) / (file_stem(command, c, i) + ".json"), r.body.dump(2) + "\n");
    if (r.csv_row) csv += *r.csv_row + "\n";
    summarize(command, c, r);
    all_verified = all_verified && r.verified;
  }
  if (!csv.empty()) {
    const fs::path path = fs::path(o.out) / "bounds.csv";
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw chronos::ConfigError("cannot write " + path.string());
    if (fresh) out << chronos::bounds::csv_header() << "\n";
    out << csv;
  }
  return all_verified ? kOk : kUnverified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal Bayesian clock interrogation protocols"};
  app.require_subcommand(1);
  Options o;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "solve one discretization and extract the protocol"},
      {"bounds", "lower and upper bounds over random discretization offsets"},
      {"refine", "iterate the estimates to their posterior Bayes values"},
      {"chain", "classical chain of repeated interrogations"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    auto* cfg = sub->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    auto* pre = sub->add_option("--preset", o.preset, "built-in configuration")
                    ->check(CLI::IsMember(chronos::cli::preset_names()));
    cfg->excludes(pre);
    sub->add_option("--seed", o.seed, "override the offset seed");
    sub->add_option("--k", o.k, "override the number of offsets")->check(CLI::PositiveNumber);
    sub->add_option("--d", o.d, "override the discretization size")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", o.jobs, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (o.config_path.empty() && o.preset.empty()) {
    std::cerr << "error: one of --config or --preset is required\n";
    return kUsage;
  }
  try {
    return run(command, o);
  } catch (const chronos::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const chronos::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kUsage;
  } catch (const chronos::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kNumerical;
  }
}
