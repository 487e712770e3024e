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

#include "lipnav/nav_sim.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "lipnav/angles.h"
#include "test_support.h"

namespace lipnav {
namespace {

constexpr double kTimeTol = 1e-12;

Environment OpenField(const Vec2& start, const Vec2& goal) {
  Environment env;
  env.start = start;
  env.goal = goal;
  return env;
}

// Returns a scripted outcome for the first call and Failed afterwards.
class ScriptedPlanner : public NavPlanner {
 public:
  ScriptedPlanner(StepControl next, StepControl following)
      : next_(next), following_(following) {}

  PlannerKind kind() const override { return PlannerKind::kLip; }
  void Reset() override { calls_ = 0; }
  PlanOutcome Plan(const LipState&, const StepControl&, StanceFoot, double,
                   std::span<const Obstacle>, int) override {
    PlanOutcome out;
    if (calls_++ == 0) {
      out.status = SolverStatus::kOptimal;
      out.next = next_;
      out.following = following_;
    } else {
      out.next = {std::nan(""), 0.0, 0.0};
    }
    return out;
  }

 private:
  StepControl next_;
  StepControl following_;
  int calls_ = 0;
};

TEST(PlannerKind, NamesRoundTrip) {
  for (PlannerKind k : {PlannerKind::kLip, PlannerKind::kDd}) {
    EXPECT_EQ(ParsePlannerKind(PlannerKindName(k)), k);
  }
  EXPECT_STREQ(PlannerKindName(PlannerKind::kLip), "lip");
  EXPECT_STREQ(PlannerKindName(PlannerKind::kDd), "dd");
  EXPECT_THROW(ParsePlannerKind("mpc"), std::invalid_argument);
}

TEST(SimConfig, RejectsBadSettings) {
  EXPECT_NO_THROW(SimConfig{}.Validate());
  SimConfig a;
  a.max_steps = 0;
  EXPECT_THROW(a.Validate(), std::invalid_argument);
  SimConfig b;
  b.replans_per_step = 0;
  EXPECT_THROW(b.Validate(), std::invalid_argument);
  SimConfig c;
  c.arrival_radius = 0.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  SimConfig d;
  d.lateral_offset = -0.1;
  EXPECT_THROW(d.Validate(), std::invalid_argument);
  SimConfig e;
  e.disturbance.sigma_velocity = -1.0;
  EXPECT_THROW(e.Validate(), std::invalid_argument);
}

TEST(MakeInitialCondition, FacesGoalAndReachesMirroredSway) {
  const Environment env = OpenField({1.0, 2.0}, {4.0, 6.0});
  PlannerConfig config;
  SimConfig sim;
  const InitialCondition ic = MakeInitialCondition(env, config, sim);
  const double theta = std::atan2(4.0, 3.0);
  EXPECT_NEAR(ic.state.theta, theta, 1e-12);
  EXPECT_EQ(ic.stance, StanceFoot::kRight);
  EXPECT_DOUBLE_EQ(ic.state.p_x, 1.0);
  EXPECT_DOUBLE_EQ(ic.state.p_y, 2.0);
  EXPECT_EQ(ic.control.omega, 0.0);

  const Vec2 fwd(std::cos(theta), std::sin(theta));
  const Vec2 left(-std::sin(theta), std::cos(theta));
  EXPECT_NEAR(ic.state.velocity().dot(fwd), sim.initial_speed, 1e-12);
  EXPECT_NEAR(ic.state.velocity().dot(left), -sim.initial_sway, 1e-12);

  const LipState end = IntegrateWithinStep(
      ic.state, ic.control.foot(), 0.0, config.lip.step_duration(), config.lip);
  EXPECT_NEAR(end.velocity().dot(fwd), sim.initial_speed, 1e-9);
  EXPECT_NEAR(end.velocity().dot(left), sim.initial_sway, 1e-9);
}

class OpenFieldEpisode : public ::testing::TestWithParam<PlannerKind> {};

TEST_P(OpenFieldEpisode, ArrivesCleanly) {
  const Environment env = OpenField({0.0, 0.0}, {4.0, 0.0});
  PlannerConfig config;
  SimConfig sim;
  const EpisodeLog log = RunEpisode(env, GetParam(), config, sim);

  EXPECT_TRUE(log.arrived);
  EXPECT_TRUE(log.outcome.finish);
  EXPECT_FALSE(log.outcome.enter);
  EXPECT_FALSE(log.outcome.collide);
  EXPECT_TRUE(log.outcome == Classify(log));
  EXPECT_LT(log.steps, sim.max_steps);
  EXPECT_EQ(log.plan_times.size(),
            static_cast<std::size_t>(log.steps * sim.replans_per_step));
  ASSERT_EQ(log.samples.size(), log.plan_times.size() + 1);
  EXPECT_EQ(log.step_deviation.size(), static_cast<std::size_t>(log.steps - 1));

  const double dt = config.lip.step_duration() / sim.replans_per_step;
  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    const EpisodeSample& s = log.samples[i];
    EXPECT_NEAR(s.time, static_cast<double>(i) * dt, kTimeTol);
    EXPECT_EQ(s.step, static_cast<int>(i) / sim.replans_per_step);
    const StanceFoot expected =
        s.step % 2 == 0 ? StanceFoot::kRight : StanceFoot::kLeft;
    EXPECT_EQ(s.stance, expected);
    EXPECT_TRUE(std::isinf(s.min_h_true));
    EXPECT_LT(std::abs(s.state.p_y), 0.5);
    if (i > 0) EXPECT_GT(s.time, log.samples[i - 1].time);
  }
}

TEST_P(OpenFieldEpisode, GoalDistanceShrinksEveryStep) {
  const Environment env = OpenField({0.0, 0.0}, {3.0, 3.0});
  const SimConfig sim;
  const EpisodeLog log = RunEpisode(env, GetParam(), PlannerConfig{}, sim);
  ASSERT_TRUE(log.arrived);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log.samples.size(); i += sim.replans_per_step) {
    const EpisodeSample& s = log.samples[i];
    if (s.step < 3) continue;
    const double d = (s.state.position() - env.goal).norm();
    EXPECT_LE(d, previous) << "t = " << s.time;
    previous = d;
  }
}

INSTANTIATE_TEST_SUITE_P(Planners, OpenFieldEpisode,
                         ::testing::Values(PlannerKind::kLip, PlannerKind::kDd),
                         [](const auto& info) {
                           return std::string(PlannerKindName(info.param));
                         });

TEST(RunEpisode, LipPredictionMatchesExecution) {
  const Environment env = OpenField({0.0, 0.0}, {4.0, 2.0});
  const EpisodeLog log =
      RunEpisode(env, PlannerKind::kLip, PlannerConfig{}, SimConfig{});
  ASSERT_FALSE(log.step_deviation.empty());
  for (double d : log.step_deviation) EXPECT_LE(d, 1e-9);
}

TEST(RunEpisode, DdPredictionDiffersFromExecution) {
  const Environment env = OpenField({0.0, 0.0}, {4.0, 2.0});
  const EpisodeLog log =
      RunEpisode(env, PlannerKind::kDd, PlannerConfig{}, SimConfig{});
  ASSERT_FALSE(log.step_deviation.empty());
  double largest = 0.0;
  for (double d : log.step_deviation) largest = std::max(largest, d);
  EXPECT_GT(largest, 1e-3);
}

TEST(RunEpisode, StopsOnCollision) {
  Environment env = OpenField({0.0, 0.0}, {4.0, 0.0});
  env.obstacles.push_back(Obstacle::Circle({0.1, 0.0}, 0.5));
  const EpisodeLog log =
      RunEpisode(env, PlannerKind::kLip, PlannerConfig{}, SimConfig{});
  ASSERT_EQ(log.samples.size(), 1u);
  EXPECT_LT(log.samples[0].min_h_true, 0.0);
  EXPECT_TRUE(log.outcome.collide);
  EXPECT_TRUE(log.outcome.enter);
  EXPECT_FALSE(log.outcome.finish);
  EXPECT_EQ(log.steps, 0);
}

TEST(RunEpisode, FailedPlansFallBackToFollowingThenHoldGait) {
  const Environment env = OpenField({0.0, 0.0}, {20.0, 0.0});
  const PlannerConfig config;
  SimConfig sim;
  sim.max_steps = 4;
  const InitialCondition ic = MakeInitialCondition(env, config, sim);
  const StepControl next{0.3, 0.1, 0.05};
  const StepControl following{0.5, -0.1, -0.05};
  ScriptedPlanner planner(next, following);
  const EpisodeLog log = RunEpisode(env, planner, config, sim);

  const int r = sim.replans_per_step;
  ASSERT_EQ(log.samples.size(), static_cast<std::size_t>(4 * r + 1));
  EXPECT_EQ(log.samples[0].control.f_x, ic.control.f_x);
  EXPECT_EQ(log.samples[r].control.f_x, next.f_x);
  EXPECT_EQ(log.samples[r].control.omega, next.omega);
  EXPECT_EQ(log.samples[2 * r].control.f_y, following.f_y);
  EXPECT_EQ(log.samples[2 * r].control.omega, following.omega);
  EXPECT_EQ(log.samples[3 * r].control.omega, 0.0);
  EXPECT_TRUE(log.outcome.violate);
  EXPECT_EQ(log.samples[1].status, SolverStatus::kFailed);
}

TEST(RunEpisode, DisturbanceIsSeeded) {
  const Environment env = OpenField({0.0, 0.0}, {3.0, 0.0});
  SimConfig sim;
  sim.disturbance = {0.01, 0.02, 9};
  const EpisodeLog a = RunEpisode(env, PlannerKind::kDd, PlannerConfig{}, sim);
  const EpisodeLog b = RunEpisode(env, PlannerKind::kDd, PlannerConfig{}, sim);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].state.ToVector(), b.samples[i].state.ToVector());
  }
  sim.disturbance.seed = 10;
  const EpisodeLog c = RunEpisode(env, PlannerKind::kDd, PlannerConfig{}, sim);
  EXPECT_NE(a.samples[2 * sim.replans_per_step].state.ToVector(),
            c.samples[2 * sim.replans_per_step].state.ToVector());
}

EpisodeSample CleanSample() {
  EpisodeSample s;
  s.status = SolverStatus::kOptimal;
  s.min_h_true = 1.0;
  s.min_h_inflated = 0.5;
  return s;
}

TEST(Classify, BoundaryIsNotEntry) {
  EpisodeLog log;
  log.arrived = true;
  log.samples.push_back(CleanSample());
  log.samples.back().min_h_inflated = 0.0;
  const OutcomeFlags f = Classify(log);
  EXPECT_FALSE(f.enter);
  EXPECT_TRUE(f.finish);
  log.samples.back().min_h_inflated = -1e-12;
  EXPECT_TRUE(Classify(log).enter);
}

TEST(Classify, ViolateOnRelaxedFailedOrSlack) {
  EpisodeLog log;
  log.samples.push_back(CleanSample());
  EXPECT_FALSE(Classify(log).violate);
  log.samples.back().status = SolverStatus::kMaxIterations;
  EXPECT_FALSE(Classify(log).violate);
  log.samples.back().max_slack = 2e-6;
  EXPECT_TRUE(Classify(log).violate);
  log.samples.back().max_slack = 0.0;
  log.samples.back().status = SolverStatus::kSlackRelaxed;
  EXPECT_TRUE(Classify(log).violate);
  log.samples.back().status = SolverStatus::kFailed;
  EXPECT_TRUE(Classify(log).violate);
}

TEST(Classify, CollisionImpliesEntryAndVoidsFinish) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    EpisodeLog log;
    log.arrived = testing::Uniform(rng, 0.0, 1.0) < 0.5;
    const int n = 1 + static_cast<int>(testing::Uniform(rng, 0.0, 10.0));
    for (int i = 0; i < n; ++i) {
      EpisodeSample s = CleanSample();
      s.min_h_true = testing::Uniform(rng, -0.2, 2.0);
      // Inflation only lowers the barrier.
      s.min_h_inflated = s.min_h_true - testing::Uniform(rng, 0.0, 1.0);
      log.samples.push_back(s);
    }
    const OutcomeFlags f = Classify(log);
    if (f.collide) {
      EXPECT_TRUE(f.enter);
      EXPECT_FALSE(f.finish);
    }
    EXPECT_EQ(f.finish, log.arrived && !f.collide);
  }
}

TEST(Summarize, CountsReplans) {
  const Environment env = OpenField({0.0, 0.0}, {2.0, 0.0});
  const EpisodeLog log =
      RunEpisode(env, PlannerKind::kLip, PlannerConfig{}, SimConfig{});
  const EpisodeRecord r = Summarize(4, log);
  EXPECT_EQ(r.seed, 4u);
  EXPECT_EQ(r.steps, log.steps);
  EXPECT_EQ(r.replans, static_cast<int>(log.plan_times.size()));
  EXPECT_TRUE(r.outcome == log.outcome);
  EXPECT_TRUE(std::isinf(r.min_h_true));
  EXPECT_LE(r.failed_replans + r.relaxed_replans, r.replans);
  EXPECT_TRUE(r.error.empty());
}

void ExpectSameTable(const BenchmarkTable& a, const BenchmarkTable& b) {
  ASSERT_EQ(a.planners.size(), b.planners.size());
  for (std::size_t p = 0; p < a.planners.size(); ++p) {
    const PlannerBlock& x = a.planners[p];
    const PlannerBlock& y = b.planners[p];
    EXPECT_EQ(x.planner, y.planner);
    EXPECT_EQ(x.finish, y.finish);
    EXPECT_EQ(x.violate, y.violate);
    EXPECT_EQ(x.enter, y.enter);
    EXPECT_EQ(x.collide, y.collide);
    ASSERT_EQ(x.episodes.size(), y.episodes.size());
    for (std::size_t e = 0; e < x.episodes.size(); ++e) {
      EXPECT_EQ(x.episodes[e].seed, y.episodes[e].seed);
      EXPECT_TRUE(x.episodes[e].outcome == y.episodes[e].outcome);
      EXPECT_EQ(x.episodes[e].steps, y.episodes[e].steps);
      EXPECT_EQ(x.episodes[e].min_h_true, y.episodes[e].min_h_true);
      EXPECT_EQ(x.episodes[e].max_step_deviation,
                y.episodes[e].max_step_deviation);
    }
  }
}

TEST(RunBenchmark, ThreadCountDoesNotChangeResults) {
  const Bounds small{0.0, 0.0, 5.0, 5.0};
  std::vector<Environment> envs;
  for (std::uint64_t seed : {3ULL, 8ULL}) {
    envs.push_back(GenerateEnvironment(seed, 2, small, {0.0, 0.0}, {5.0, 5.0}));
  }
  const std::vector<PlannerKind> planners{PlannerKind::kLip, PlannerKind::kDd};
  const BenchmarkTable serial =
      RunBenchmark(envs, planners, PlannerConfig{}, SimConfig{}, 1);
  const BenchmarkTable parallel =
      RunBenchmark(envs, planners, PlannerConfig{}, SimConfig{}, 4);
  ExpectSameTable(serial, parallel);
  ASSERT_EQ(serial.planners.size(), 2u);
  EXPECT_EQ(serial.planners[0].episodes.size(), 2u);
  EXPECT_EQ(serial.planners[0].episodes[1].seed, 8u);
}

TEST(RunBenchmark, EmptyEnvironmentList) {
  const std::vector<PlannerKind> planners{PlannerKind::kLip};
  const BenchmarkTable table =
      RunBenchmark({}, planners, PlannerConfig{}, SimConfig{}, 2);
  ASSERT_EQ(table.planners.size(), 1u);
  EXPECT_EQ(table.planners[0].finish, 0);
  EXPECT_EQ(table.planners[0].collide, 0);
  EXPECT_TRUE(table.planners[0].episodes.empty());
}

}  // namespace
}  // namespace lipnav
