// Copyright 2026 The lipnav Authors
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

#include "lipnav/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "lipnav/environment.h"
#include "lipnav/io.h"

namespace lipnav::cli {
namespace {

namespace fs = std::filesystem;

struct Ablation {
  bool no_heading_cost = false;
  bool no_maneuverability = false;

  void Apply(PlannerConfig* config) const {
    if (no_heading_cost) {
      config->weights.heading = 0.0;
      for (StageWeights& w : config->stage_weights) w.heading = 0.0;
    }
    if (no_maneuverability) config->maneuverability = false;
  }
};

io::RunConfig LoadRunConfig(const std::string& path) {
  if (path.empty()) return {};
  return io::LoadConfig(path);
}

std::string EnvFileName(std::uint64_t seed) {
  return "env_" + std::to_string(seed) + ".json";
}

const char* Flag(bool b) { return b ? "true" : "false"; }

std::string Number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

int GenEnv(std::uint64_t seed, int count, int obstacles, double margin,
           const std::string& out_dir, std::ostream& out) {
  if (count < 0) throw std::invalid_argument("--count must be >= 0");
  if (obstacles < 0) throw std::invalid_argument("--obstacles must be >= 0");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw io::IoError("cannot create directory " + out_dir);
  }
  const Environment defaults;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    const Environment env = GenerateEnvironment(
        s, obstacles, defaults.bounds, defaults.start, defaults.goal, margin);
    io::SaveEnvironment(fs::path(out_dir) / EnvFileName(s), env);
  }
  out << "wrote " << count << " environment(s) to " << out_dir << "\n";
  return kOk;
}

int Simulate(const std::string& env_path, const std::string& planner,
             const std::string& config_path, const std::string& out_path,
             const Ablation& ablation, std::ostream& out) {
  const PlannerKind kind = ParsePlannerKind(planner);
  const Environment env = io::LoadEnvironment(env_path);
  io::RunConfig config = LoadRunConfig(config_path);
  ablation.Apply(&config.planner);
  const EpisodeLog log = RunEpisode(env, kind, config.planner, config.sim);
  if (!out_path.empty()) io::SaveTrajectory(out_path, log.samples);
  const OutcomeFlags& f = log.outcome;
  out << "planner=" << PlannerKindName(kind) << " finish=" << Flag(f.finish)
      << " violate=" << Flag(f.violate) << " enter=" << Flag(f.enter)
      << " collide=" << Flag(f.collide) << " steps=" << log.steps
      << " samples=" << log.samples.size()
      << " mean_abs_omega=" << Number(MeanAbsTurnRate(log.samples)) << "\n";
  return kOk;
}

std::vector<Environment> LoadEnvironmentDir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw io::IoError("not a directory: " + dir);
  std::vector<std::pair<fs::path, Environment>> loaded;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") {
      continue;
    }
    loaded.emplace_back(entry.path(), io::LoadEnvironment(entry.path()));
  }
  std::sort(loaded.begin(), loaded.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second.seed, a.first) < std::tie(b.second.seed, b.first);
  });
  std::vector<Environment> envs;
  for (auto& [path, env] : loaded) envs.push_back(std::move(env));
  return envs;
}

int Bench(const std::string& envs_dir, const std::string& planner,
          const std::string& config_path, const std::string& out_path, int jobs,
          const Ablation& ablation, std::ostream& out) {
  if (jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
  std::vector<PlannerKind> kinds;
  if (planner == "both") {
    kinds = {PlannerKind::kLip, PlannerKind::kDd};
  } else {
    kinds = {ParsePlannerKind(planner)};
  }
  const std::vector<Environment> envs = LoadEnvironmentDir(envs_dir);
  io::Report report;
  report.config = LoadRunConfig(config_path);
  ablation.Apply(&report.config.planner);
  report.table =
      RunBenchmark(envs, kinds, report.config.planner, report.config.sim, jobs);
  io::SaveReport(out_path, report);
  for (const PlannerBlock& block : report.table.planners) {
    out << PlannerKindName(block.planner)
        << ": episodes=" << block.episodes.size() << " finish=" << block.finish
        << " violate=" << block.violate << " enter=" << block.enter
        << " collide=" << block.collide << "\n";
  }
  return kOk;
}

}  // namespace

double MeanAbsTurnRate(std::span<const EpisodeSample> samples) {
  double sum = 0.0;
  int steps = 0;
  std::optional<int> last_step;
  for (const EpisodeSample& s : samples) {
    if (last_step == s.step) continue;
    last_step = s.step;
    sum += std::abs(s.control.omega);
    ++steps;
  }
  return steps > 0 ? sum / steps : 0.0;
}

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Footstep navigation planners and benchmark", "lipnav"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int count = 1;
  int obstacles = 8;
  double margin = CbfConfig{}.inflation_margin;
  std::string out_dir;
  CLI::App* gen = app.add_subcommand("gen-env", "Write seeded environments");
  gen->add_option("--seed", seed, "First seed");
  gen->add_option("--count", count, "Number of environments");
  gen->add_option("--obstacles", obstacles, "Obstacles per environment");
  gen->add_option("--margin", margin, "Inflation margin for the clearance");
  gen->add_option("--out", out_dir, "Output directory")->required();

  std::string env_path, planner = "lip", config_path, out_path;
  Ablation ablation;
  CLI::App* sim = app.add_subcommand("simulate", "Run one episode");
  sim->add_option("--env", env_path, "Environment file")->required();
  sim->add_option("--planner", planner, "lip or dd");
  sim->add_option("--config", config_path, "Configuration file");
  sim->add_option("--out", out_path, "Trajectory CSV");
  sim->add_flag("--no-heading-cost", ablation.no_heading_cost,
                "Zero the heading weight");
  sim->add_flag("--no-maneuverability", ablation.no_maneuverability,
                "Drop the maneuverability rows");

  std::string envs_dir, bench_planner = "both", report_path;
  int jobs = 1;
  CLI::App* bench = app.add_subcommand("bench", "Run every environment");
  bench->add_option("--envs", envs_dir, "Environment directory")->required();
  bench->add_option("--planner", bench_planner, "lip, dd or both");
  bench->add_option("--config", config_path, "Configuration file");
  bench->add_option("--out", report_path, "Report JSON")->required();
  bench->add_option("--jobs", jobs, "Parallel episodes");
  bench->add_flag("--no-heading-cost", ablation.no_heading_cost,
                  "Zero the heading weight");
  bench->add_flag("--no-maneuverability", ablation.no_maneuverability,
                  "Drop the maneuverability rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      return GenEnv(seed, count, obstacles, margin, out_dir, out);
    }
    if (sim->parsed()) {
      return Simulate(env_path, planner, config_path, out_path, ablation, out);
    }
    return Bench(envs_dir, bench_planner, config_path, report_path, jobs,
                 ablation, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace lipnav::cli
