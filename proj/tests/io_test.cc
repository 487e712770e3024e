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

#include "lipnav/io.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace lipnav::io {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Replaces the only occurrence of `from`.
std::string ReplaceOnce(std::string text, const std::string& from,
                        const std::string& to) {
  const std::size_t at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  EXPECT_EQ(text.find(from, at + 1), std::string::npos) << from;
  if (at != std::string::npos) text.replace(at, from.size(), to);
  return text;
}

void ExpectParseErrorMentioning(const std::string& text,
                                const std::string& needle) {
  try {
    ParseEnvironment(text);
    ADD_FAILURE() << "no error for " << needle;
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
        << e.what();
  }
}

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lipnav_io_test_" + name);
}

TEST(EnvironmentJson, RoundTripsGeneratedFields) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Environment env =
        GenerateEnvironment(seed, 8, Bounds{}, {0.0, 0.0}, {10.0, 10.0});
    const Environment back = ParseEnvironment(SerializeEnvironment(env));
    EXPECT_TRUE(back == env) << "seed " << seed;
  }
}

TEST(EnvironmentJson, KeepsFullSeedRange) {
  Environment env;
  env.seed = std::numeric_limits<std::uint64_t>::max();
  EXPECT_EQ(ParseEnvironment(SerializeEnvironment(env)).seed, env.seed);
}

TEST(EnvironmentJson, SaveAndLoad) {
  const Environment env =
      GenerateEnvironment(3, 4, Bounds{}, {0.0, 0.0}, {10.0, 10.0});
  const auto path = TempPath("env.json");
  SaveEnvironment(path, env);
  EXPECT_TRUE(LoadEnvironment(path) == env);
  std::filesystem::remove(path);
  EXPECT_THROW(LoadEnvironment(path), IoError);
}

TEST(EnvironmentJson, RejectsMalformedInput) {
  Environment env;
  env.obstacles.push_back(Obstacle::Ellipse({5.0, 5.0}, 0.8, 0.4, 0.3));
  const std::string good = SerializeEnvironment(env);
  ASSERT_NO_THROW(ParseEnvironment(good));

  EXPECT_THROW(ParseEnvironment("{"), ParseError);
  ExpectParseErrorMentioning(
      ReplaceOnce(good, "\"semi_minor\": 0.4", "\"semi_minor\": 0.9"),
      "obstacles[0]");
  ExpectParseErrorMentioning(ReplaceOnce(good, "\"ellipse\"", "\"square\""),
                             "obstacles[0]");
  ExpectParseErrorMentioning(ReplaceOnce(good, "\"seed\"", "\"sead\""), "seed");
  ExpectParseErrorMentioning(ReplaceOnce(good, "\"goal\"", "\"target\""),
                             "goal");
  ExpectParseErrorMentioning(
      ReplaceOnce(good, "\"rotation\"", "\"rotation\": 0.1, \"tilt\""), "tilt");
}

TEST(ConfigJson, RoundTripsNonDefaults) {
  RunConfig config;
  config.planner.horizon = 5;
  config.planner.weights.heading = 12.5;
  config.planner.stage_weights = {
      {1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, {7.0, 8.0}, {9.0, 10.0}};
  config.planner.cbf.gamma = 0.5;
  config.planner.maneuverability = false;
  config.planner.solver.max_iterations = 40;
  config.sim.max_steps = 17;
  config.sim.disturbance = {0.01, 0.03, 123};
  const std::string text = SerializeConfig(config);
  const RunConfig back = ParseConfig(text);
  EXPECT_EQ(back.planner.horizon, 5);
  EXPECT_EQ(back.planner.weights.heading, 12.5);
  ASSERT_EQ(back.planner.stage_weights.size(), 5u);
  EXPECT_EQ(back.planner.stage_weights[4].heading, 10.0);
  EXPECT_EQ(back.planner.cbf.gamma, 0.5);
  EXPECT_FALSE(back.planner.maneuverability);
  EXPECT_EQ(back.planner.solver.max_iterations, 40);
  EXPECT_EQ(back.sim.max_steps, 17);
  EXPECT_EQ(back.sim.disturbance.seed, 123u);
  EXPECT_EQ(back.sim.disturbance.sigma_velocity, 0.03);
  EXPECT_EQ(SerializeConfig(back), text);
}

TEST(ConfigJson, MissingFieldsTakeDefaults) {
  const RunConfig config = ParseConfig(R"({"horizon": 4, "sim": {}})");
  const RunConfig defaults;
  EXPECT_EQ(config.planner.horizon, 4);
  EXPECT_EQ(config.planner.cbf.gamma, defaults.planner.cbf.gamma);
  EXPECT_EQ(config.sim.replans_per_step, defaults.sim.replans_per_step);
  EXPECT_EQ(SerializeConfig(ParseConfig("{}")), SerializeConfig(defaults));
}

TEST(ConfigJson, RejectsUnknownAndOutOfRange) {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      ParseConfig(text);
      ADD_FAILURE() << "no error for " << text;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
          << e.what();
    }
  };
  expect_error(R"({"horizn": 3})", "horizn");
  expect_error(R"({"cbf": {"gama": 0.3}})", "cbf.gama");
  expect_error(R"({"horizon": "three"})", "horizon");
  expect_error(R"({"horizon": 0})", "");
  expect_error(R"({"sim": {"replans_per_step": 0}})", "");
  expect_error(R"({"cbf": {"gamma": 1.5}})", "");
  expect_error(R"([1, 2])", "");
}

std::vector<EpisodeSample> ShortEpisode() {
  Environment env;
  env.goal = {2.0, 1.0};
  env.obstacles.push_back(Obstacle::Circle({1.0, -1.5}, 0.4));
  SimConfig sim;
  sim.max_steps = 5;
  return RunEpisode(env, PlannerKind::kDd, PlannerConfig{}, sim).samples;
}

TEST(TrajectoryCsv, RoundTripsExactly) {
  const std::vector<EpisodeSample> samples = ShortEpisode();
  ASSERT_GT(samples.size(), 10u);
  std::stringstream ss;
  WriteTrajectory(ss, samples);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, kTrajectoryHeader);
  ss.seekg(0);
  const std::vector<EpisodeSample> back = ReadTrajectory(ss);
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(back[i].time, samples[i].time);
    EXPECT_EQ(back[i].step, samples[i].step);
    EXPECT_EQ(back[i].state.ToVector(), samples[i].state.ToVector());
    EXPECT_EQ(back[i].control.ToVector(), samples[i].control.ToVector());
    EXPECT_EQ(back[i].stance, samples[i].stance);
    EXPECT_EQ(back[i].status, samples[i].status);
    EXPECT_EQ(back[i].max_slack, samples[i].max_slack);
    EXPECT_EQ(back[i].min_h_true, samples[i].min_h_true);
    EXPECT_EQ(back[i].min_h_inflated, samples[i].min_h_inflated);
  }
}

TEST(TrajectoryCsv, InfiniteBarrierSurvives) {
  EpisodeSample s;
  s.min_h_true = kInf;
  s.min_h_inflated = kInf;
  std::stringstream ss;
  WriteTrajectory(ss, std::vector<EpisodeSample>{s});
  const std::vector<EpisodeSample> back = ReadTrajectory(ss);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].min_h_true, kInf);
}

TEST(TrajectoryCsv, SaveAndLoad) {
  const std::vector<EpisodeSample> samples = ShortEpisode();
  const auto path = TempPath("traj.csv");
  SaveTrajectory(path, samples);
  EXPECT_EQ(LoadTrajectory(path).size(), samples.size());
  std::filesystem::remove(path);
}

std::string TwoRows() {
  std::vector<EpisodeSample> samples(2);
  samples[1].time = 0.05;
  samples[1].stance = StanceFoot::kLeft;
  std::stringstream ss;
  WriteTrajectory(ss, samples);
  return ss.str();
}

void ExpectCsvError(const std::string& text, const std::string& needle) {
  std::istringstream in(text);
  try {
    ReadTrajectory(in);
    ADD_FAILURE() << "no error for " << needle;
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
        << e.what();
  }
}

TEST(TrajectoryCsv, RejectsMalformedInput) {
  const std::string good = TwoRows();
  std::istringstream in(good);
  ASSERT_EQ(ReadTrajectory(in).size(), 2u);

  ExpectCsvError(ReplaceOnce(good, "time_s,step", "step,time_s"), "line 1");
  ExpectCsvError(ReplaceOnce(good, "\n0.050000000000000003,", "\n0,"),
                 "line 3, column 1");
  ExpectCsvError(ReplaceOnce(good, ",Left,", ",Up,"), "line 3, column 11");
  ExpectCsvError(good + "1,0,0\n", "line 4");
  ExpectCsvError(
      ReplaceOnce(good, "\n0.050000000000000003,", "\n0.050000000000000003x,"),
      "line 3, column 1");
}

Report SmallReport() {
  Report report;
  report.config.sim.max_steps = 30;
  std::vector<Environment> envs;
  Environment open;
  open.goal = {2.0, 0.0};
  envs.push_back(open);
  envs.push_back(
      GenerateEnvironment(6, 2, Bounds{0, 0, 4, 4}, {0.0, 0.0}, {4.0, 4.0}));
  const std::vector<PlannerKind> planners{PlannerKind::kDd};
  report.table =
      RunBenchmark(envs, planners, report.config.planner, report.config.sim, 1);
  return report;
}

TEST(ReportJson, RoundTrips) {
  const Report report = SmallReport();
  const std::string text = SerializeReport(report);
  EXPECT_NE(text.find("null"), std::string::npos);
  const Report back = ParseReport(text);
  ASSERT_EQ(back.table.planners.size(), 1u);
  const PlannerBlock& b = back.table.planners[0];
  EXPECT_EQ(b.planner, PlannerKind::kDd);
  EXPECT_EQ(b.finish, report.table.planners[0].finish);
  ASSERT_EQ(b.episodes.size(), 2u);
  EXPECT_EQ(b.episodes[0].min_h_true, kInf);
  EXPECT_EQ(b.episodes[1].seed, 6u);
  EXPECT_EQ(b.episodes[1].min_h_true,
            report.table.planners[0].episodes[1].min_h_true);
  EXPECT_EQ(back.config.sim.max_steps, 30);
  EXPECT_EQ(SerializeReport(back), text);
}

TEST(ReportJson, RejectsCountsThatDisagreeWithEpisodes) {
  Report report;
  PlannerBlock block;
  block.planner = PlannerKind::kLip;
  EpisodeRecord e;
  e.outcome.finish = true;
  block.episodes.push_back(e);
  block.finish = 1;
  report.table.planners.push_back(block);
  const std::string text = SerializeReport(report);
  ASSERT_NO_THROW(ParseReport(text));
  EXPECT_THROW(ParseReport(ReplaceOnce(text, "\"finish\": 1", "\"finish\": 2")),
               ParseError);
}

}  // namespace
}  // namespace lipnav::io
