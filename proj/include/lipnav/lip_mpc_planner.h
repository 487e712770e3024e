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

// N-step LIP model-predictive footstep planner.
//
// The decision vector is z = [u_0 .. u_{N-1}, s_0 .. s_{NM-1}]: three
// numbers per step control followed by one non-negative slack per DCBF row
// (M obstacles per step). States are eliminated by single shooting through
// the linear step map, so x_k is affine in the controls.

#ifndef LIPNAV_LIP_MPC_PLANNER_H_
#define LIPNAV_LIP_MPC_PLANNER_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lipnav/lip_model.h"
#include "lipnav/obstacle.h"
#include "lipnav/safety_constraints.h"
#include "lipnav/sqp_solver.h"

namespace lipnav {

struct StageWeights {
  double position = 1.0;  // q
  double heading = 50.0;  // r
};

struct SolverSettings {
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-6;
  int max_iterations = 100;
  double slack_penalty = 1e4;
};

struct PlannerConfig {
  int horizon = 3;
  StageWeights weights;
  // Optional per-stage override; empty means `weights` for every stage.
  std::vector<StageWeights> stage_weights;
  KinematicLimits limits;
  CbfConfig cbf;
  Vec2 goal{10.0, 10.0};
  SolverSettings solver;
  bool maneuverability = true;
  LipParams lip;

  // Weights of stage k in [1, N].
  const StageWeights& weight(int k) const;

  // Throws std::invalid_argument.
  void Validate() const;
};

enum class SolverStatus { kOptimal, kSlackRelaxed, kMaxIterations, kFailed };

const char* SolverStatusName(SolverStatus status);
// Throws std::invalid_argument on an unknown name.
SolverStatus ParseSolverStatus(const std::string& name);

struct NlpSolution {
  std::vector<StepControl> controls;  // u_0 .. u_{N-1}
  std::vector<LipState> states;       // x_1 .. x_N
  Eigen::VectorXd slacks;
  SolverStatus status = SolverStatus::kFailed;
  double max_slack = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
};

LipState PreprocessState(const LipState& x_cur, const StepControl& u_cur,
                         double t_rem, const LipParams& params);

// Direction from the robot to the goal; the current heading when the robot
// sits on the goal.
double HeadingGoal(const LipState& x, const Vec2& goal);

double StageCost(const LipState& x, const Vec2& goal,
                 const StageWeights& weights);
// Gradient with respect to (p_x, v_x, p_y, v_y, theta).
Vec5 StageCostGradient(const LipState& x, const Vec2& goal,
                       const StageWeights& weights);

class NlpProblem : public nlp::DenseProblem {
 public:
  NlpProblem(const LipState& x0, StanceFoot stance0,
             std::vector<Obstacle> obstacles, const PlannerConfig& config);

  int horizon() const { return horizon_; }
  int num_slacks() const { return horizon_ * num_obstacles_; }
  int num_rows() const { return horizon_ * rows_per_step_; }
  const LipState& initial_state() const { return x0_; }
  StanceFoot initial_stance() const { return stance0_; }
  std::span<const Obstacle> obstacles() const { return obstacles_; }
  const PlannerConfig& config() const { return config_; }

  const Eigen::VectorXd& initial_guess() const { return initial_guess_; }
  void set_initial_guess(const Eigen::VectorXd& z);

  // Slacks are taken from z; states are wrapped.
  std::vector<StepControl> Controls(const Eigen::VectorXd& z) const;
  std::vector<LipState> States(const Eigen::VectorXd& z) const;

  // Constraint bundle of the controls in z, without slacks.
  ConstraintBundle Bundle(const Eigen::VectorXd& z) const;
  double Objective(const Eigen::VectorXd& z) const;
  // Smallest slack making every DCBF row of z feasible.
  Eigen::VectorXd MinimalSlacks(const Eigen::VectorXd& z) const;
  // Controls only; slacks set to MinimalSlacks.
  Eigen::VectorXd Pack(std::span<const StepControl> controls) const;

  int num_variables() const override { return 3 * horizon_ + num_slacks(); }
  // Bundle rows plus, with maneuverability on, one extra row per step: the
  // upper maneuverability row is handed to the solver as the two linear
  // branches of |omega|, tightened by the smoothing offset.
  int num_constraints() const override;
  void Evaluate(const Eigen::VectorXd& z, nlp::Evaluation* out) const override;
  bool IsElastic(int row) const override;
  int num_curved_variables() const override { return 3 * horizon_; }
  double FixedCurvature(int i) const override;
  double LowerBound(int i) const override;

 private:
  // Unwrapped-heading rollout stacked as [x_1 .. x_N].
  Eigen::VectorXd RolloutVector(const Eigen::VectorXd& z) const;
  std::vector<LipState> RolloutStates(const Eigen::VectorXd& z) const;

  LipState x0_;
  StanceFoot stance0_;
  std::vector<Obstacle> obstacles_;
  PlannerConfig config_;
  int horizon_;
  int num_obstacles_;
  int rows_per_step_;
  StepMatrices step_;
  // d[x_1..x_N] / d[u_0..u_{N-1}], constant.
  Eigen::MatrixXd sensitivity_;
  Eigen::VectorXd initial_guess_;
  std::vector<char> elastic_;
};

// Feet under the propagated CoM, no turning.
std::vector<StepControl> DefaultGuess(const LipState& x0,
                                      const PlannerConfig& config);

// Obstacles must already be inflated. With a warm solution the controls are
// shifted by `shift` steps, repeating the last one.
NlpProblem Assemble(const LipState& x0, StanceFoot stance0,
                    std::span<const Obstacle> inflated_obstacles,
                    const PlannerConfig& config,
                    const NlpSolution* warm = nullptr, int shift = 1);

NlpSolution Solve(const NlpProblem& problem, const PlannerConfig& config);

// preprocess -> inflate -> assemble -> solve. u_0 is the foothold of the step
// after the current one, so its stance is the opposite of stance_cur.
NlpSolution Plan(const LipState& x_cur, const StepControl& u_cur,
                 StanceFoot stance_cur, double t_rem,
                 std::span<const Obstacle> obstacles,
                 const PlannerConfig& config, const NlpSolution* warm = nullptr,
                 int shift = 1);

// Planner that keeps its own warm start between calls.
class LipMpcPlanner {
 public:
  explicit LipMpcPlanner(PlannerConfig config);

  const PlannerConfig& config() const { return config_; }
  const std::optional<NlpSolution>& last() const { return last_; }
  void Reset() { last_.reset(); }

  NlpSolution Plan(const LipState& x_cur, const StepControl& u_cur,
                   StanceFoot stance_cur, double t_rem,
                   std::span<const Obstacle> obstacles, int shift = 1);

 private:
  PlannerConfig config_;
  std::optional<NlpSolution> last_;
};

}  // namespace lipnav

#endif  // LIPNAV_LIP_MPC_PLANNER_H_
