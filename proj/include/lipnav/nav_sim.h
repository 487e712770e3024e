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

// Closed-loop step-to-step simulation with mid-step replanning, outcome
// classification and the multi-environment benchmark.

#ifndef LIPNAV_NAV_SIM_H_
#define LIPNAV_NAV_SIM_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipnav/dd_baseline.h"
#include "lipnav/environment.h"
#include "lipnav/lip_model.h"
#include "lipnav/lip_mpc_planner.h"
#include "lipnav/obstacle.h"

namespace lipnav {

enum class PlannerKind { kLip, kDd };

const char* PlannerKindName(PlannerKind kind);  // "lip", "dd"
// Throws std::invalid_argument.
PlannerKind ParsePlannerKind(const std::string& name);

struct PlanOutcome {
  // Foothold and heading increment of the step after the current one.
  StepControl next;
  // What the plan intends for the step after that, if it says.
  std::optional<StepControl> following;
  SolverStatus status = SolverStatus::kFailed;
  double max_slack = 0.0;
  // Planner's own prediction of the CoM position at the end of `next`.
  Vec2 predicted_position = Vec2::Zero();
  double wall_time = 0.0;
};

// Common face of the two planners. Obstacles are the true geometry; each
// planner inflates them itself.
class NavPlanner {
 public:
  virtual ~NavPlanner() = default;
  virtual PlannerKind kind() const = 0;
  virtual void Reset() = 0;
  virtual PlanOutcome Plan(const LipState& x_cur, const StepControl& u_cur,
                           StanceFoot stance_cur, double t_rem,
                           std::span<const Obstacle> obstacles, int shift) = 0;
};

std::unique_ptr<NavPlanner> MakePlanner(PlannerKind kind,
                                        const PlannerConfig& config,
                                        double lateral_offset);

// Zero-mean Gaussian kicks added to the state at every step boundary.
struct DisturbanceSpec {
  double sigma_position = 0.0;  // m, per axis
  double sigma_velocity = 0.0;  // m/s, per axis
  std::uint64_t seed = 0;

  bool enabled() const { return sigma_position > 0.0 || sigma_velocity > 0.0; }
};

struct SimConfig {
  int max_steps = 100;
  int replans_per_step = 8;
  double arrival_radius = 0.3;
  // DD tracker foot offset from the deadbeat foothold.
  double lateral_offset = 0.1;
  // Body-frame gait the episode starts in: longitudinal speed and the
  // magnitude of the lateral sway.
  double initial_speed = 0.6;
  double initial_sway = 0.25;
  DisturbanceSpec disturbance;

  // Throws std::invalid_argument.
  void Validate() const;
};

struct EpisodeSample {
  double time = 0.0;
  int step = 0;
  LipState state;
  StepControl control;  // active stance foot and heading increment
  StanceFoot stance = StanceFoot::kRight;
  double min_h_true = 0.0;
  double min_h_inflated = 0.0;
  SolverStatus status = SolverStatus::kFailed;
  double max_slack = 0.0;
};

struct OutcomeFlags {
  bool finish = false;
  bool violate = false;
  bool enter = false;
  bool collide = false;

  friend bool operator==(const OutcomeFlags&, const OutcomeFlags&) = default;
};

struct EpisodeLog {
  std::vector<EpisodeSample> samples;
  OutcomeFlags outcome;
  int steps = 0;
  bool arrived = false;
  // Per completed step after the first: distance between the CoM at the end
  // of the step and the position the planner predicted for it when it
  // committed the foothold.
  std::vector<double> step_deviation;
  std::vector<double> plan_times;  // seconds, one per replan
  double wall_time = 0.0;
};

struct InitialCondition {
  LipState state;
  StepControl control;
  StanceFoot stance = StanceFoot::kRight;
};

// Start of a right-stance step at env.start, heading toward the goal, in a
// steady gait: body velocity (initial_speed, -initial_sway) now and
// (initial_speed, +initial_sway) at the end of the step.
InitialCondition MakeInitialCondition(const Environment& env,
                                      const PlannerConfig& config,
                                      const SimConfig& sim);

// The planner's goal is taken from env. A Failed plan leaves the previously
// committed foothold in force.
EpisodeLog RunEpisode(const Environment& env, NavPlanner& planner,
                      const PlannerConfig& config, const SimConfig& sim);
EpisodeLog RunEpisode(const Environment& env, PlannerKind kind,
                      const PlannerConfig& config, const SimConfig& sim);

OutcomeFlags Classify(const EpisodeLog& log);

struct EpisodeRecord {
  std::uint64_t seed = 0;
  OutcomeFlags outcome;
  int steps = 0;
  int replans = 0;
  int failed_replans = 0;
  int relaxed_replans = 0;
  double min_h_true = 0.0;
  double min_h_inflated = 0.0;
  // Smallest inflated barrier over samples whose replan was Optimal;
  // +inf when there are none.
  double min_h_inflated_optimal = 0.0;
  double max_step_deviation = 0.0;
  std::string error;  // empty unless the episode threw
};

struct PlannerBlock {
  PlannerKind planner = PlannerKind::kLip;
  int finish = 0;
  int violate = 0;
  int enter = 0;
  int collide = 0;
  std::vector<EpisodeRecord> episodes;  // in environment order
};

struct BenchmarkTable {
  std::vector<PlannerBlock> planners;
};

EpisodeRecord Summarize(std::uint64_t seed, const EpisodeLog& log);

// Episodes run on up to `jobs` threads; the result does not depend on it.
BenchmarkTable RunBenchmark(std::span<const Environment> environments,
                            std::span<const PlannerKind> planners,
                            const PlannerConfig& config, const SimConfig& sim,
                            int jobs = 1);

}  // namespace lipnav

#endif  // LIPNAV_NAV_SIM_H_
