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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "lipnav/angles.h"

namespace lipnav {

const char* PlannerKindName(PlannerKind kind) {
  return kind == PlannerKind::kLip ? "lip" : "dd";
}

PlannerKind ParsePlannerKind(const std::string& name) {
  if (name == "lip") return PlannerKind::kLip;
  if (name == "dd") return PlannerKind::kDd;
  throw std::invalid_argument("unknown planner '" + name + "'");
}

namespace {

class LipNavPlanner : public NavPlanner {
 public:
  explicit LipNavPlanner(const PlannerConfig& config) : planner_(config) {}

  PlannerKind kind() const override { return PlannerKind::kLip; }
  void Reset() override { planner_.Reset(); }

  PlanOutcome Plan(const LipState& x_cur, const StepControl& u_cur,
                   StanceFoot stance_cur, double t_rem,
                   std::span<const Obstacle> obstacles, int shift) override {
    const NlpSolution sol =
        planner_.Plan(x_cur, u_cur, stance_cur, t_rem, obstacles, shift);
    PlanOutcome out;
    out.next = sol.controls.front();
    if (sol.controls.size() > 1) out.following = sol.controls[1];
    out.status = sol.status;
    out.max_slack = sol.max_slack;
    out.predicted_position = sol.states.front().position();
    out.wall_time = sol.wall_time;
    return out;
  }

 private:
  LipMpcPlanner planner_;
};

class DdNavPlanner : public NavPlanner {
 public:
  DdNavPlanner(const PlannerConfig& config, double lateral_offset)
      : planner_(config, lateral_offset) {}

  PlannerKind kind() const override { return PlannerKind::kDd; }
  void Reset() override { planner_.Reset(); }

  PlanOutcome Plan(const LipState& x_cur, const StepControl& u_cur,
                   StanceFoot stance_cur, double t_rem,
                   std::span<const Obstacle> obstacles, int shift) override {
    const DdTrackerOutput tracked =
        planner_.Plan(x_cur, u_cur, stance_cur, t_rem, obstacles, shift);
    PlanOutcome out;
    out.next = tracked.next;
    out.status = tracked.solution.status;
    out.max_slack = tracked.solution.max_slack;
    out.predicted_position = tracked.solution.poses.front().position();
    out.wall_time = tracked.solution.wall_time;
    return out;
  }

 private:
  DdMpcPlanner planner_;
};

Vec2 Forward(double theta) { return {std::cos(theta), std::sin(theta)}; }
Vec2 Left(double theta) { return {-std::sin(theta), std::cos(theta)}; }

// Foothold for the step starting at x that keeps the forward speed and
// mirrors the lateral sway.
StepControl HoldGait(const LipState& x, StanceFoot stance,
                     const LipParams& params) {
  const Vec2 fwd = Forward(x.theta);
  const Vec2 left = Left(x.theta);
  const Vec2 v = x.velocity();
  const Vec2 v_des = fwd.dot(v) * fwd - left.dot(v) * left;
  const Vec2 foot = DeadbeatFootPlacement(x, stance, v_des, params, 0.0);
  return {foot.x(), foot.y(), 0.0};
}

}  // namespace

std::unique_ptr<NavPlanner> MakePlanner(PlannerKind kind,
                                        const PlannerConfig& config,
                                        double lateral_offset) {
  if (kind == PlannerKind::kLip) {
    return std::make_unique<LipNavPlanner>(config);
  }
  return std::make_unique<DdNavPlanner>(config, lateral_offset);
}

void SimConfig::Validate() const {
  const bool ok = max_steps >= 1 && replans_per_step >= 1 &&
                  arrival_radius > 0.0 && lateral_offset >= 0.0 &&
                  std::isfinite(initial_speed) && std::isfinite(initial_sway) &&
                  disturbance.sigma_position >= 0.0 &&
                  disturbance.sigma_velocity >= 0.0;
  if (!ok) throw std::invalid_argument("SimConfig: invalid settings");
}

InitialCondition MakeInitialCondition(const Environment& env,
                                      const PlannerConfig& config,
                                      const SimConfig& sim) {
  const Vec2 delta = env.goal - env.start;
  const double theta =
      delta.norm() > 0.0 ? std::atan2(delta.y(), delta.x()) : 0.0;
  const Vec2 fwd = Forward(theta);
  const Vec2 left = Left(theta);
  const Vec2 v_now = sim.initial_speed * fwd - sim.initial_sway * left;
  const Vec2 v_end = sim.initial_speed * fwd + sim.initial_sway * left;

  InitialCondition ic;
  ic.stance = StanceFoot::kRight;
  ic.state.p_x = env.start.x();
  ic.state.p_y = env.start.y();
  ic.state.v_x = v_now.x();
  ic.state.v_y = v_now.y();
  ic.state.theta = WrapAngle(theta);
  const Vec2 foot =
      DeadbeatFootPlacement(ic.state, ic.stance, v_end, config.lip, 0.0);
  ic.control = {foot.x(), foot.y(), 0.0};
  return ic;
}

EpisodeLog RunEpisode(const Environment& env, NavPlanner& planner,
                      const PlannerConfig& base_config, const SimConfig& sim) {
  const auto start_time = std::chrono::steady_clock::now();
  sim.Validate();
  PlannerConfig config = base_config;
  config.goal = env.goal;
  config.Validate();

  const std::vector<Obstacle> inflated =
      InflateAll(env.obstacles, config.cbf.inflation_margin);
  const InitialCondition ic = MakeInitialCondition(env, config, sim);
  LipState x = ic.state;
  StepControl u_cur = ic.control;
  StanceFoot stance = ic.stance;

  const double period = config.lip.step_duration();
  const int replans = sim.replans_per_step;
  const double dt = period / replans;
  SplitMix64 rng(sim.disturbance.seed);

  EpisodeLog log;
  planner.Reset();
  SolverStatus last_status = SolverStatus::kOptimal;
  double last_slack = 0.0;
  bool collided = false;

  auto record = [&](double time, int step) {
    EpisodeSample s;
    s.time = time;
    s.step = step;
    s.state = x;
    s.control = u_cur;
    s.stance = stance;
    s.min_h_true = MinBarrier(env.obstacles, x.position());
    s.min_h_inflated = MinBarrier(inflated, x.position());
    s.status = last_status;
    s.max_slack = last_slack;
    log.samples.push_back(s);
    if (s.min_h_true < 0.0) collided = true;
  };

  std::optional<Vec2> predicted_boundary;
  std::optional<StepControl> planned_following;
  int step = 0;
  for (; step < sim.max_steps && !collided; ++step) {
    std::optional<StepControl> pending;
    std::optional<Vec2> predicted_next;
    std::optional<StepControl> following;
    for (int j = 0; j < replans; ++j) {
      const double t_rem = period - j * dt;
      const PlanOutcome out =
          planner.Plan(x, u_cur, stance, t_rem, env.obstacles, j == 0 ? 1 : 0);
      log.plan_times.push_back(out.wall_time);
      last_status = out.status;
      last_slack = out.max_slack;
      if (out.status != SolverStatus::kFailed && out.next.IsFinite()) {
        pending = out.next;
        predicted_next = out.predicted_position;
        following = out.following;
      }
      record(step * period + j * dt, step);
      if (collided) break;
      x = IntegrateWithinStep(x, u_cur.foot(), u_cur.omega, dt, config.lip);
    }
    if (collided) break;

    if (predicted_boundary) {
      log.step_deviation.push_back((x.position() - *predicted_boundary).norm());
    }
    predicted_boundary = predicted_next;
    stance = Opposite(stance);
    if (pending) {
      u_cur = *pending;
      planned_following = following;
    } else if (planned_following) {
      u_cur = *planned_following;
      planned_following.reset();
    } else {
      u_cur = HoldGait(x, stance, config.lip);
    }

    if (sim.disturbance.enabled()) {
      x.p_x += sim.disturbance.sigma_position * rng.Gaussian();
      x.p_y += sim.disturbance.sigma_position * rng.Gaussian();
      x.v_x += sim.disturbance.sigma_velocity * rng.Gaussian();
      x.v_y += sim.disturbance.sigma_velocity * rng.Gaussian();
    }
    if ((x.position() - env.goal).norm() <= sim.arrival_radius) {
      log.arrived = true;
      ++step;
      break;
    }
  }
  log.steps = step;
  if (!collided) record(step * period, step);

  log.outcome = Classify(log);
  log.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start_time)
                      .count();
  return log;
}

EpisodeLog RunEpisode(const Environment& env, PlannerKind kind,
                      const PlannerConfig& config, const SimConfig& sim) {
  PlannerConfig goal_config = config;
  goal_config.goal = env.goal;
  std::unique_ptr<NavPlanner> planner =
      MakePlanner(kind, goal_config, sim.lateral_offset);
  return RunEpisode(env, *planner, goal_config, sim);
}

OutcomeFlags Classify(const EpisodeLog& log) {
  OutcomeFlags flags;
  for (const EpisodeSample& s : log.samples) {
    if (s.status == SolverStatus::kSlackRelaxed ||
        s.status == SolverStatus::kFailed || s.max_slack > 1e-6) {
      flags.violate = true;
    }
    if (s.min_h_inflated < 0.0) flags.enter = true;
    if (s.min_h_true < 0.0) flags.collide = true;
  }
  flags.finish = log.arrived && !flags.collide;
  return flags;
}

EpisodeRecord Summarize(std::uint64_t seed, const EpisodeLog& log) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  EpisodeRecord r;
  r.seed = seed;
  r.outcome = log.outcome;
  r.steps = log.steps;
  r.replans = static_cast<int>(log.plan_times.size());
  r.min_h_true = kInf;
  r.min_h_inflated = kInf;
  r.min_h_inflated_optimal = kInf;
  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    const EpisodeSample& s = log.samples[i];
    r.min_h_true = std::min(r.min_h_true, s.min_h_true);
    r.min_h_inflated = std::min(r.min_h_inflated, s.min_h_inflated);
    // The closing sample repeats the last replan's status.
    const bool is_replan = static_cast<int>(i) < r.replans;
    if (is_replan && s.status == SolverStatus::kFailed) ++r.failed_replans;
    if (is_replan && s.status == SolverStatus::kSlackRelaxed) {
      ++r.relaxed_replans;
    }
    if (s.status == SolverStatus::kOptimal) {
      r.min_h_inflated_optimal =
          std::min(r.min_h_inflated_optimal, s.min_h_inflated);
    }
  }
  for (double d : log.step_deviation) {
    r.max_step_deviation = std::max(r.max_step_deviation, d);
  }
  return r;
}

BenchmarkTable RunBenchmark(std::span<const Environment> environments,
                            std::span<const PlannerKind> planners,
                            const PlannerConfig& config, const SimConfig& sim,
                            int jobs) {
  const std::size_t num_envs = environments.size();
  const std::size_t total = num_envs * planners.size();
  std::vector<EpisodeRecord> records(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < total; i = next++) {
      const Environment& env = environments[i % num_envs];
      const PlannerKind kind = planners[i / num_envs];
      try {
        records[i] = Summarize(env.seed, RunEpisode(env, kind, config, sim));
      } catch (const std::exception& e) {
        records[i] = EpisodeRecord{};
        records[i].seed = env.seed;
        records[i].error = e.what();
      }
    }
  };
  const int threads =
      static_cast<int>(std::min<std::size_t>(std::max(jobs, 1), total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  BenchmarkTable table;
  for (std::size_t p = 0; p < planners.size(); ++p) {
    PlannerBlock block;
    block.planner = planners[p];
    for (std::size_t e = 0; e < num_envs; ++e) {
      const EpisodeRecord& r = records[p * num_envs + e];
      block.finish += r.outcome.finish;
      block.violate += r.outcome.violate;
      block.enter += r.outcome.enter;
      block.collide += r.outcome.collide;
      block.episodes.push_back(r);
    }
    table.planners.push_back(std::move(block));
  }
  return table;
}

}  // namespace lipnav
