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

// Differential-drive comparison pipeline: a unicycle MPC that shares the
// stage cost and DCBF rows of the LIP planner but knows nothing about the
// pendulum, and a deadbeat gait tracker that turns its (v, omega) commands
// into footholds.

#ifndef LIPNAV_DD_BASELINE_H_
#define LIPNAV_DD_BASELINE_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lipnav/lip_model.h"
#include "lipnav/lip_mpc_planner.h"
#include "lipnav/obstacle.h"
#include "lipnav/sqp_solver.h"

namespace lipnav {

struct DdPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // (-pi, pi]

  Vec2 position() const { return {x, y}; }
};

struct DdCommand {
  double v = 0.0;      // m/s along the heading
  double omega = 0.0;  // rad per step
};

// Forward-Euler unicycle. The heading gains omega * dt / step_duration.
// Throws std::invalid_argument unless dt > 0.
DdPose DdDynamics(const DdPose& pose, const DdCommand& cmd, double dt,
                  double step_duration);

struct DdSolution {
  std::vector<DdCommand> commands;  // c_0 .. c_{N-1}
  std::vector<DdPose> poses;        // p_1 .. p_N
  Eigen::VectorXd slacks;
  SolverStatus status = SolverStatus::kFailed;
  double max_slack = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
};

// z = [v_0, omega_0, .., v_{N-1}, omega_{N-1}, slacks]. Per step k the rows
// are one DCBF row per obstacle, then v bounds and omega bounds. The
// unicycle advances by dt = step_duration per step.
class DdProblem : public nlp::DenseProblem {
 public:
  DdProblem(const DdPose& pose0, std::vector<Obstacle> obstacles,
            const PlannerConfig& config);

  int horizon() const { return horizon_; }
  int num_slacks() const { return horizon_ * num_obstacles_; }
  int rows_per_step() const { return num_obstacles_ + 4; }
  const DdPose& initial_pose() const { return pose0_; }

  const Eigen::VectorXd& initial_guess() const { return initial_guess_; }
  void set_initial_guess(const Eigen::VectorXd& z);

  std::vector<DdCommand> Commands(const Eigen::VectorXd& z) const;
  // Headings wrapped.
  std::vector<DdPose> Poses(const Eigen::VectorXd& z) const;
  // Constraint rows of the commands in z without slack help.
  Eigen::VectorXd RawResiduals(const Eigen::VectorXd& z) const;
  Eigen::VectorXd MinimalSlacks(const Eigen::VectorXd& z) const;
  Eigen::VectorXd Pack(std::span<const DdCommand> commands) const;

  int num_variables() const override { return 2 * horizon_ + num_slacks(); }
  int num_constraints() const override { return horizon_ * rows_per_step(); }
  void Evaluate(const Eigen::VectorXd& z, nlp::Evaluation* out) const override;
  bool IsElastic(int row) const override;
  int num_curved_variables() const override { return 2 * horizon_; }
  double FixedCurvature(int i) const override;
  double LowerBound(int i) const override;

 private:
  struct Rollout {
    std::vector<DdPose> poses;  // p_0 .. p_N, headings unwrapped
    // d p_k / d z for k = 1..N; rows (x, y, theta), columns 2N controls.
    std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> jacobians;
  };
  Rollout Roll(const Eigen::VectorXd& z) const;
  void Residuals(const Rollout& roll, const Eigen::VectorXd& z,
                 Eigen::VectorXd* values, Eigen::MatrixXd* jacobian) const;

  DdPose pose0_;
  std::vector<Obstacle> obstacles_;
  PlannerConfig config_;
  int horizon_;
  int num_obstacles_;
  Eigen::VectorXd initial_guess_;
};

// Constant cruise at the midpoint of the speed bounds, no turning.
std::vector<DdCommand> DefaultDdGuess(const PlannerConfig& config);

// Obstacles must already be inflated.
DdSolution SolveDd(const DdProblem& problem, const PlannerConfig& config);
DdSolution PlanDd(const DdPose& pose, std::span<const Obstacle> inflated,
                  const PlannerConfig& config, const DdSolution* warm = nullptr,
                  int shift = 1);

// Foothold that brings the end-of-step CoM velocity to v_des_world, plus
// lateral_offset along the body-frame lateral axis of x.theta: toward the
// left for left stance, toward the right for right stance.
Vec2 DeadbeatFootPlacement(const LipState& x, StanceFoot stance,
                           const Vec2& v_des_world, const LipParams& params,
                           double lateral_offset);

struct DdTrackerOutput {
  StepControl next;  // foothold and heading increment of the next step
  DdSolution solution;
  DdPose pose0;
};

// DD-MPC plus deadbeat tracking, driven with the same inputs as the LIP
// planner. Keeps its own warm start.
class DdMpcPlanner {
 public:
  DdMpcPlanner(PlannerConfig config, double lateral_offset);

  const PlannerConfig& config() const { return config_; }
  void Reset() { last_.reset(); }

  DdTrackerOutput Plan(const LipState& x_cur, const StepControl& u_cur,
                       StanceFoot stance_cur, double t_rem,
                       std::span<const Obstacle> obstacles, int shift = 1);

 private:
  PlannerConfig config_;
  double lateral_offset_;
  std::optional<DdSolution> last_;
};

}  // namespace lipnav

#endif  // LIPNAV_DD_BASELINE_H_
