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

#include "lipnav/dd_baseline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipnav/angles.h"
#include "lipnav/safety_constraints.h"

namespace lipnav {

using Eigen::MatrixXd;
using Eigen::VectorXd;

DdPose DdDynamics(const DdPose& pose, const DdCommand& cmd, double dt,
                  double step_duration) {
  if (!(dt > 0.0) || !(step_duration > 0.0)) {
    throw std::invalid_argument("DdDynamics: dt must be positive");
  }
  return {pose.x + cmd.v * std::cos(pose.theta) * dt,
          pose.y + cmd.v * std::sin(pose.theta) * dt,
          WrapAngle(pose.theta + cmd.omega * dt / step_duration)};
}

namespace {

LipState AsLipState(const DdPose& pose) {
  LipState x;
  x.p_x = pose.x;
  x.p_y = pose.y;
  x.theta = pose.theta;
  return x;
}

}  // namespace

DdProblem::DdProblem(const DdPose& pose0, std::vector<Obstacle> obstacles,
                     const PlannerConfig& config)
    : pose0_(pose0),
      obstacles_(std::move(obstacles)),
      config_(config),
      horizon_(config.horizon),
      num_obstacles_(static_cast<int>(obstacles_.size())) {
  config_.Validate();
  if (!std::isfinite(pose0.x) || !std::isfinite(pose0.y) ||
      !std::isfinite(pose0.theta)) {
    throw std::invalid_argument("DdProblem: non-finite initial pose");
  }
  initial_guess_ = Pack(DefaultDdGuess(config_));
}

void DdProblem::set_initial_guess(const VectorXd& z) {
  if (z.size() != num_variables()) {
    throw std::invalid_argument("DdProblem: initial guess has wrong size");
  }
  initial_guess_ = z;
}

std::vector<DdCommand> DdProblem::Commands(const VectorXd& z) const {
  std::vector<DdCommand> out(horizon_);
  for (int k = 0; k < horizon_; ++k) out[k] = {z(2 * k), z(2 * k + 1)};
  return out;
}

DdProblem::Rollout DdProblem::Roll(const VectorXd& z) const {
  const double dt = config_.lip.step_duration();
  const int n = 2 * horizon_;
  Rollout roll;
  roll.poses.reserve(horizon_ + 1);
  roll.poses.push_back(pose0_);
  Eigen::Matrix<double, 3, Eigen::Dynamic> jac =
      Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, n);
  for (int k = 0; k < horizon_; ++k) {
    const DdPose& p = roll.poses.back();
    const double v = z(2 * k);
    const double c = std::cos(p.theta);
    const double s = std::sin(p.theta);
    Eigen::Matrix<double, 3, Eigen::Dynamic> next = jac;
    next.row(0) += -dt * v * s * jac.row(2);
    next.row(1) += dt * v * c * jac.row(2);
    next(0, 2 * k) += dt * c;
    next(1, 2 * k) += dt * s;
    next(2, 2 * k + 1) += 1.0;
    jac = next;
    roll.jacobians.push_back(jac);
    roll.poses.push_back(
        {p.x + dt * v * c, p.y + dt * v * s, p.theta + z(2 * k + 1)});
  }
  return roll;
}

std::vector<DdPose> DdProblem::Poses(const VectorXd& z) const {
  const Rollout roll = Roll(z);
  std::vector<DdPose> out(roll.poses.begin() + 1, roll.poses.end());
  for (DdPose& p : out) p.theta = WrapAngle(p.theta);
  return out;
}

void DdProblem::Residuals(const Rollout& roll, const VectorXd& z,
                          VectorXd* values, MatrixXd* jacobian) const {
  const KinematicLimits& lim = config_.limits;
  const double gamma = config_.cbf.gamma;
  const int per_step = rows_per_step();
  values->resize(horizon_ * per_step);
  if (jacobian != nullptr) jacobian->setZero(horizon_ * per_step, 2 * horizon_);
  for (int k = 0; k < horizon_; ++k) {
    const Vec2 p_cur = roll.poses[k].position();
    const Vec2 p_next = roll.poses[k + 1].position();
    int row = k * per_step;
    for (int j = 0; j < num_obstacles_; ++j, ++row) {
      const Obstacle& obs = obstacles_[j];
      (*values)(row) = DcbfResidual(BarrierValue(obs, p_next),
                                    BarrierValue(obs, p_cur), gamma);
      if (jacobian == nullptr) continue;
      const Vec2 g_next = BarrierGradient(obs, p_next);
      jacobian->row(row) = g_next.transpose() * roll.jacobians[k].topRows(2);
      if (k > 0) {
        const Vec2 g_cur = BarrierGradient(obs, p_cur);
        jacobian->row(row) += (gamma - 1.0) * g_cur.transpose() *
                              roll.jacobians[k - 1].topRows(2);
      }
    }
    const double v = z(2 * k);
    const double omega = z(2 * k + 1);
    (*values)(row) = v - lim.v_x_min;
    (*values)(row + 1) = lim.v_x_max - v;
    (*values)(row + 2) = lim.turn_rate_max - omega;
    (*values)(row + 3) = omega + lim.turn_rate_max;
    if (jacobian != nullptr) {
      (*jacobian)(row, 2 * k) = 1.0;
      (*jacobian)(row + 1, 2 * k) = -1.0;
      (*jacobian)(row + 2, 2 * k + 1) = -1.0;
      (*jacobian)(row + 3, 2 * k + 1) = 1.0;
    }
  }
}

VectorXd DdProblem::RawResiduals(const VectorXd& z) const {
  VectorXd values;
  Residuals(Roll(z), z, &values, nullptr);
  return values;
}

VectorXd DdProblem::MinimalSlacks(const VectorXd& z) const {
  VectorXd slacks = VectorXd::Zero(num_slacks());
  if (num_slacks() == 0) return slacks;
  const VectorXd raw = RawResiduals(z);
  for (int k = 0; k < horizon_; ++k) {
    for (int j = 0; j < num_obstacles_; ++j) {
      slacks(k * num_obstacles_ + j) =
          std::max(0.0, -raw(k * rows_per_step() + j));
    }
  }
  return slacks;
}

VectorXd DdProblem::Pack(std::span<const DdCommand> commands) const {
  if (static_cast<int>(commands.size()) != horizon_) {
    throw std::invalid_argument("DdProblem::Pack: wrong number of commands");
  }
  VectorXd z = VectorXd::Zero(num_variables());
  for (int k = 0; k < horizon_; ++k) {
    z(2 * k) = commands[k].v;
    z(2 * k + 1) = commands[k].omega;
  }
  z.tail(num_slacks()) = MinimalSlacks(z);
  return z;
}

void DdProblem::Evaluate(const VectorXd& z, nlp::Evaluation* out) const {
  const int n_controls = 2 * horizon_;
  const Rollout roll = Roll(z);
  const auto slacks = z.tail(num_slacks());
  const double w = config_.solver.slack_penalty;

  out->objective = w * slacks.squaredNorm();
  out->gradient.setZero(num_variables());
  for (int k = 1; k <= horizon_; ++k) {
    const LipState x = AsLipState(roll.poses[k]);
    const StageWeights& weights = config_.weight(k);
    out->objective += StageCost(x, config_.goal, weights);
    const Vec5 g = StageCostGradient(x, config_.goal, weights);
    const Eigen::Vector3d g_pose(g(0), g(2), g(4));
    out->gradient.head(n_controls) +=
        roll.jacobians[k - 1].transpose() * g_pose;
  }
  out->gradient.tail(num_slacks()) = 2.0 * w * slacks;

  MatrixXd jac;
  Residuals(roll, z, &out->constraints, &jac);
  out->jacobian.setZero(num_constraints(), num_variables());
  out->jacobian.leftCols(n_controls) = jac;
  for (int k = 0; k < horizon_; ++k) {
    for (int j = 0; j < num_obstacles_; ++j) {
      const int row = k * rows_per_step() + j;
      const int slack = k * num_obstacles_ + j;
      out->constraints(row) += slacks(slack);
      out->jacobian(row, n_controls + slack) = 1.0;
    }
  }
}

bool DdProblem::IsElastic(int row) const {
  return row % rows_per_step() >= num_obstacles_;
}

double DdProblem::FixedCurvature(int /*i*/) const {
  return 2.0 * config_.solver.slack_penalty;
}

double DdProblem::LowerBound(int i) const {
  if (i >= 2 * horizon_) return 0.0;
  return nlp::DenseProblem::LowerBound(i);
}

std::vector<DdCommand> DefaultDdGuess(const PlannerConfig& config) {
  const double cruise = 0.5 * (config.limits.v_x_min + config.limits.v_x_max);
  return std::vector<DdCommand>(config.horizon, DdCommand{cruise, 0.0});
}

namespace {

DdSolution ClassifyDd(const DdProblem& problem, const VectorXd& z,
                      nlp::SqpStatus sqp_status, double tol) {
  DdSolution sol;
  sol.commands = problem.Commands(z);
  sol.poses = problem.Poses(z);
  sol.slacks = z.tail(problem.num_slacks());
  sol.max_slack = sol.slacks.size() > 0 ? sol.slacks.maxCoeff() : 0.0;

  if (!z.allFinite() || sqp_status == nlp::SqpStatus::kNumericalError) {
    sol.status = SolverStatus::kFailed;
    sol.objective = std::numeric_limits<double>::quiet_NaN();
    return sol;
  }
  nlp::Evaluation ev;
  problem.Evaluate(z, &ev);
  sol.objective = ev.objective;
  const double violation =
      ev.constraints.size() > 0 ? -ev.constraints.minCoeff() : 0.0;
  if (!std::isfinite(ev.objective) || !(violation <= tol) ||
      (sol.slacks.size() > 0 && sol.slacks.minCoeff() < -tol)) {
    sol.status = SolverStatus::kFailed;
  } else if (sqp_status == nlp::SqpStatus::kConverged) {
    const VectorXd raw = problem.RawResiduals(z);
    const bool raw_feasible = raw.size() == 0 || raw.minCoeff() >= -tol;
    sol.status = sol.max_slack <= tol && raw_feasible
                     ? SolverStatus::kOptimal
                     : SolverStatus::kSlackRelaxed;
  } else {
    sol.status = SolverStatus::kMaxIterations;
  }
  return sol;
}

}  // namespace

// Same two-phase scheme as the LIP planner: hard DCBF rows first, the soft
// problem only when that fails.
DdSolution SolveDd(const DdProblem& problem, const PlannerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](DdSolution sol, int iterations) {
    sol.iterations = iterations;
    sol.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return sol;
  };
  nlp::SqpOptions options;
  options.feasibility_tol = config.solver.feasibility_tol;
  options.optimality_tol = config.solver.optimality_tol;
  options.max_iterations = config.solver.max_iterations;
  const double tol = config.solver.feasibility_tol;

  int iterations = 0;
  std::optional<DdSolution> hard_sol;
  if (problem.num_slacks() > 0) {
    const nlp::PinnedTailProblem hard(problem);
    const nlp::SqpResult result = nlp::SolveSqp(
        hard, problem.initial_guess().head(hard.num_variables()), options);
    iterations += result.iterations;
    hard_sol = ClassifyDd(problem, hard.Embed(result.z), result.status, tol);
    if (hard_sol->status == SolverStatus::kOptimal) {
      return finish(std::move(*hard_sol), iterations);
    }
  }

  const nlp::SqpResult result =
      nlp::SolveSqp(problem, problem.initial_guess(), options);
  iterations += result.iterations;
  DdSolution sol = ClassifyDd(problem, result.z, result.status, tol);
  const bool soft_stuck = sol.status == SolverStatus::kFailed ||
                          sol.status == SolverStatus::kMaxIterations;
  if (soft_stuck && hard_sol &&
      hard_sol->status == SolverStatus::kMaxIterations &&
      (sol.status == SolverStatus::kFailed ||
       hard_sol->objective <= sol.objective)) {
    sol = std::move(*hard_sol);
  }
  return finish(std::move(sol), iterations);
}

DdSolution PlanDd(const DdPose& pose, std::span<const Obstacle> inflated,
                  const PlannerConfig& config, const DdSolution* warm,
                  int shift) {
  DdProblem problem(
      pose, std::vector<Obstacle>(inflated.begin(), inflated.end()), config);
  if (warm != nullptr &&
      static_cast<int>(warm->commands.size()) == config.horizon) {
    const bool finite = std::all_of(
        warm->commands.begin(), warm->commands.end(), [](const DdCommand& c) {
          return std::isfinite(c.v) && std::isfinite(c.omega);
        });
    if (finite) {
      std::vector<DdCommand> shifted(config.horizon);
      for (int k = 0; k < config.horizon; ++k) {
        shifted[k] = warm->commands[std::min(k + std::max(shift, 0),
                                             config.horizon - 1)];
      }
      problem.set_initial_guess(problem.Pack(shifted));
    }
  }
  return SolveDd(problem, config);
}

Vec2 DeadbeatFootPlacement(const LipState& x, StanceFoot stance,
                           const Vec2& v_des_world, const LipParams& params,
                           double lateral_offset) {
  const double bt = params.beta() * params.step_duration();
  const double sh = std::sinh(bt);
  if (!(sh > 0.0)) {
    throw std::invalid_argument("DeadbeatFootPlacement: zero step duration");
  }
  const double ch = std::cosh(bt);
  const Vec2 foot =
      x.position() - (v_des_world - ch * x.velocity()) / (params.beta() * sh);
  const Vec2 left(-std::sin(x.theta), std::cos(x.theta));
  const double side = stance == StanceFoot::kLeft ? 1.0 : -1.0;
  return foot + side * lateral_offset * left;
}

DdMpcPlanner::DdMpcPlanner(PlannerConfig config, double lateral_offset)
    : config_(std::move(config)), lateral_offset_(lateral_offset) {
  config_.Validate();
  if (!(lateral_offset_ >= 0.0) || !std::isfinite(lateral_offset_)) {
    throw std::invalid_argument("DdMpcPlanner: invalid lateral offset");
  }
}

DdTrackerOutput DdMpcPlanner::Plan(const LipState& x_cur,
                                   const StepControl& u_cur,
                                   StanceFoot stance_cur, double t_rem,
                                   std::span<const Obstacle> obstacles,
                                   int shift) {
  const LipState x0 = PreprocessState(x_cur, u_cur, t_rem, config_.lip);
  const std::vector<Obstacle> inflated =
      InflateAll(obstacles, config_.cbf.inflation_margin);

  DdTrackerOutput out;
  out.pose0 = {x0.p_x, x0.p_y, x0.theta};
  out.solution =
      PlanDd(out.pose0, inflated, config_, last_ ? &*last_ : nullptr, shift);
  last_ = out.solution;

  const DdCommand& cmd = out.solution.commands.front();
  const double heading = x0.theta + cmd.omega;
  const Vec2 v_des = cmd.v * Vec2(std::cos(heading), std::sin(heading));
  const Vec2 foot = DeadbeatFootPlacement(x0, Opposite(stance_cur), v_des,
                                          config_.lip, lateral_offset_);
  out.next = {foot.x(), foot.y(), cmd.omega};
  return out;
}

}  // namespace lipnav
