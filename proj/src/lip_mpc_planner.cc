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

#include "lipnav/lip_mpc_planner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipnav/angles.h"

namespace lipnav {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const StageWeights& PlannerConfig::weight(int k) const {
  if (stage_weights.empty()) return weights;
  return stage_weights.at(k - 1);
}

void PlannerConfig::Validate() const {
  if (horizon < 1) {
    throw std::invalid_argument("PlannerConfig: horizon must be at least 1");
  }
  if (!stage_weights.empty() &&
      static_cast<int>(stage_weights.size()) != horizon) {
    throw std::invalid_argument(
        "PlannerConfig: need one stage weight per horizon step");
  }
  auto check_weights = [](const StageWeights& w) {
    if (!(w.position >= 0.0) || !(w.heading >= 0.0) ||
        !std::isfinite(w.position) || !std::isfinite(w.heading)) {
      throw std::invalid_argument("PlannerConfig: weights must be >= 0");
    }
  };
  check_weights(weights);
  for (const StageWeights& w : stage_weights) check_weights(w);
  limits.Validate();
  cbf.Validate();
  if (!goal.allFinite()) {
    throw std::invalid_argument("PlannerConfig: non-finite goal");
  }
  if (!(solver.feasibility_tol > 0.0) || !(solver.optimality_tol > 0.0) ||
      solver.max_iterations < 1 || !(solver.slack_penalty > 0.0)) {
    throw std::invalid_argument("PlannerConfig: invalid solver settings");
  }
}

const char* SolverStatusName(SolverStatus status) {
  switch (status) {
    case SolverStatus::kOptimal:
      return "Optimal";
    case SolverStatus::kSlackRelaxed:
      return "SlackRelaxed";
    case SolverStatus::kMaxIterations:
      return "MaxIterations";
    case SolverStatus::kFailed:
      return "Failed";
  }
  return "Failed";
}

SolverStatus ParseSolverStatus(const std::string& name) {
  for (SolverStatus s : {SolverStatus::kOptimal, SolverStatus::kSlackRelaxed,
                         SolverStatus::kMaxIterations, SolverStatus::kFailed}) {
    if (name == SolverStatusName(s)) return s;
  }
  throw std::invalid_argument("unknown solver status '" + name + "'");
}

LipState PreprocessState(const LipState& x_cur, const StepControl& u_cur,
                         double t_rem, const LipParams& params) {
  return IntegrateWithinStep(x_cur, u_cur.foot(), u_cur.omega, t_rem, params);
}

namespace {

constexpr double kAtGoal = 1e-9;

}  // namespace

double HeadingGoal(const LipState& x, const Vec2& goal) {
  const Vec2 delta = goal - x.position();
  if (delta.norm() < kAtGoal) return WrapAngle(x.theta);
  return WrapAngle(std::atan2(delta.y(), delta.x()));
}

double StageCost(const LipState& x, const Vec2& goal,
                 const StageWeights& weights) {
  const double heading_error = WrapAngle(x.theta - HeadingGoal(x, goal));
  return weights.position * (x.position() - goal).squaredNorm() +
         weights.heading * heading_error * heading_error;
}

Vec5 StageCostGradient(const LipState& x, const Vec2& goal,
                       const StageWeights& weights) {
  Vec5 g = Vec5::Zero();
  const Vec2 delta = goal - x.position();
  g(0) = -2.0 * weights.position * delta.x();
  g(2) = -2.0 * weights.position * delta.y();
  const double rho2 = delta.squaredNorm();
  if (std::sqrt(rho2) < kAtGoal) return g;
  const double e = WrapAngle(x.theta - HeadingGoal(x, goal));
  // d(heading goal)/dp = (delta_y, -delta_x) / |delta|^2.
  g(0) -= 2.0 * weights.heading * e * delta.y() / rho2;
  g(2) += 2.0 * weights.heading * e * delta.x() / rho2;
  g(4) = 2.0 * weights.heading * e;
  return g;
}

// ---------------------------------------------------------------------------

NlpProblem::NlpProblem(const LipState& x0, StanceFoot stance0,
                       std::vector<Obstacle> obstacles,
                       const PlannerConfig& config)
    : x0_(x0),
      stance0_(stance0),
      obstacles_(std::move(obstacles)),
      config_(config),
      horizon_(config.horizon),
      num_obstacles_(static_cast<int>(obstacles_.size())),
      rows_per_step_(
          RowsPerStep(num_obstacles_, BundleOptions{config.maneuverability})),
      step_(ComputeStepMatrices(config.lip, config.lip.step_duration())) {
  config_.Validate();
  if (!x0.IsFinite()) {
    throw std::invalid_argument("NlpProblem: non-finite initial state");
  }
  const int n = horizon_;
  sensitivity_.setZero(5 * n, 3 * n);
  for (int j = 0; j < n; ++j) {
    Eigen::Matrix<double, 5, 3> block = step_.b;
    for (int k = j; k < n; ++k) {
      sensitivity_.block<5, 3>(5 * k, 3 * j) = block;
      block = step_.a * block;
    }
  }
  elastic_.assign(num_rows(), 1);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < num_obstacles_; ++j) {
      elastic_[k * rows_per_step_ + j] = 0;
    }
  }
  const std::vector<StepControl> guess = DefaultGuess(x0_, config_);
  initial_guess_ = Pack(guess);
}

void NlpProblem::set_initial_guess(const VectorXd& z) {
  if (z.size() != num_variables()) {
    throw std::invalid_argument("NlpProblem: initial guess has wrong size");
  }
  initial_guess_ = z;
}

std::vector<StepControl> NlpProblem::Controls(const VectorXd& z) const {
  std::vector<StepControl> out(horizon_);
  for (int k = 0; k < horizon_; ++k) {
    out[k] = StepControl::FromVector(z.segment<3>(3 * k));
  }
  return out;
}

VectorXd NlpProblem::RolloutVector(const VectorXd& z) const {
  VectorXd states(5 * horizon_);
  Vec5 x = x0_.ToVector();
  for (int k = 0; k < horizon_; ++k) {
    x = step_.a * x + step_.b * z.segment<3>(3 * k);
    states.segment<5>(5 * k) = x;
  }
  return states;
}

std::vector<LipState> NlpProblem::RolloutStates(const VectorXd& z) const {
  const VectorXd stacked = RolloutVector(z);
  std::vector<LipState> out(horizon_);
  for (int k = 0; k < horizon_; ++k) {
    out[k] = LipState::FromVector(stacked.segment<5>(5 * k));
  }
  return out;
}

std::vector<LipState> NlpProblem::States(const VectorXd& z) const {
  std::vector<LipState> out = RolloutStates(z);
  for (LipState& x : out) x.theta = WrapAngle(x.theta);
  return out;
}

ConstraintBundle NlpProblem::Bundle(const VectorXd& z) const {
  const std::vector<LipState> states = RolloutStates(z);
  const std::vector<StepControl> controls = Controls(z);
  return EvaluateConstraintBundle(x0_, states, controls, stance0_, obstacles_,
                                  config_.limits, config_.cbf,
                                  BundleOptions{config_.maneuverability});
}

double NlpProblem::Objective(const VectorXd& z) const {
  const std::vector<LipState> states = RolloutStates(z);
  double f = 0.0;
  for (int k = 0; k < horizon_; ++k) {
    f += StageCost(states[k], config_.goal, config_.weight(k + 1));
  }
  return f + config_.solver.slack_penalty * z.tail(num_slacks()).squaredNorm();
}

VectorXd NlpProblem::MinimalSlacks(const VectorXd& z) const {
  VectorXd slacks = VectorXd::Zero(num_slacks());
  if (num_slacks() == 0) return slacks;
  const ConstraintBundle bundle = Bundle(z);
  for (int k = 0; k < horizon_; ++k) {
    for (int j = 0; j < num_obstacles_; ++j) {
      slacks(k * num_obstacles_ + j) =
          std::max(0.0, -bundle.values(k * rows_per_step_ + j));
    }
  }
  return slacks;
}

VectorXd NlpProblem::Pack(std::span<const StepControl> controls) const {
  if (static_cast<int>(controls.size()) != horizon_) {
    throw std::invalid_argument("NlpProblem::Pack: wrong number of controls");
  }
  VectorXd z = VectorXd::Zero(num_variables());
  for (int k = 0; k < horizon_; ++k) {
    z.segment<3>(3 * k) = controls[k].ToVector();
  }
  z.tail(num_slacks()) = MinimalSlacks(z);
  return z;
}

void NlpProblem::Evaluate(const VectorXd& z, nlp::Evaluation* out) const {
  const int n_controls = 3 * horizon_;
  const std::vector<LipState> states = RolloutStates(z);
  const std::vector<StepControl> controls = Controls(z);
  const auto slacks = z.tail(num_slacks());
  const double w = config_.solver.slack_penalty;

  VectorXd grad_states(5 * horizon_);
  out->objective = w * slacks.squaredNorm();
  for (int k = 0; k < horizon_; ++k) {
    const StageWeights& weights = config_.weight(k + 1);
    out->objective += StageCost(states[k], config_.goal, weights);
    grad_states.segment<5>(5 * k) =
        StageCostGradient(states[k], config_.goal, weights);
  }
  out->gradient.resize(num_variables());
  out->gradient.head(n_controls) = sensitivity_.transpose() * grad_states;
  out->gradient.tail(num_slacks()) = 2.0 * w * slacks;

  const ConstraintBundle bundle = EvaluateConstraintBundle(
      x0_, states, controls, stance0_, obstacles_, config_.limits, config_.cbf,
      BundleOptions{config_.maneuverability});
  out->constraints = bundle.values;
  out->jacobian.setZero(num_rows(), num_variables());
  out->jacobian.leftCols(n_controls).noalias() =
      bundle.jacobian.leftCols(5 * horizon_) * sensitivity_;
  out->jacobian.leftCols(n_controls) += bundle.jacobian.rightCols(n_controls);
  for (int k = 0; k < horizon_; ++k) {
    for (int j = 0; j < num_obstacles_; ++j) {
      const int row = k * rows_per_step_ + j;
      const int slack = k * num_obstacles_ + j;
      out->constraints(row) += slacks(slack);
      out->jacobian(row, n_controls + slack) = 1.0;
    }
  }
  if (!config_.maneuverability) return;

  // v_max - k sqrt(omega^2 + eps^2) - v_long >= 0 is implied by
  // v_max - k eps - v_long -/+ k omega >= 0, which is smooth in omega.
  const double k_turn = config_.limits.alpha / kPi;
  const double offset = k_turn * kAbsSmoothing;
  out->constraints.conservativeResize(num_constraints());
  out->jacobian.conservativeResize(num_constraints(), Eigen::NoChange);
  for (int k = 0; k < horizon_; ++k) {
    const int upper = k * rows_per_step_ + num_obstacles_ + 4;
    const int extra = num_rows() + k;
    const int omega_col = 3 * k + 2;
    const double omega = controls[k].omega;
    const double abs_omega =
        std::sqrt(omega * omega + kAbsSmoothing * kAbsSmoothing);
    // Strip the smoothed |omega| term to get v_max - v_long.
    const double base = out->constraints(upper) + k_turn * abs_omega;
    out->jacobian.row(extra) = out->jacobian.row(upper);
    out->constraints(upper) = base - offset - k_turn * omega;
    out->jacobian(upper, omega_col) = -k_turn;
    out->constraints(extra) = base - offset + k_turn * omega;
    out->jacobian(extra, omega_col) = k_turn;
  }
}

int NlpProblem::num_constraints() const {
  return num_rows() + (config_.maneuverability ? horizon_ : 0);
}

bool NlpProblem::IsElastic(int row) const {
  return row >= num_rows() || elastic_[row] != 0;
}

double NlpProblem::FixedCurvature(int /*i*/) const {
  return 2.0 * config_.solver.slack_penalty;
}

double NlpProblem::LowerBound(int i) const {
  if (i >= 3 * horizon_) return 0.0;
  return nlp::DenseProblem::LowerBound(i);
}

// ---------------------------------------------------------------------------

std::vector<StepControl> DefaultGuess(const LipState& x0,
                                      const PlannerConfig& config) {
  std::vector<StepControl> out;
  out.reserve(config.horizon);
  LipState x = x0;
  for (int k = 0; k < config.horizon; ++k) {
    const StepControl u{x.p_x, x.p_y, 0.0};
    out.push_back(u);
    x = StepDynamics(x, u, config.lip);
  }
  return out;
}

NlpProblem Assemble(const LipState& x0, StanceFoot stance0,
                    std::span<const Obstacle> inflated_obstacles,
                    const PlannerConfig& config, const NlpSolution* warm,
                    int shift) {
  NlpProblem problem(x0, stance0,
                     std::vector<Obstacle>(inflated_obstacles.begin(),
                                           inflated_obstacles.end()),
                     config);
  if (warm != nullptr &&
      static_cast<int>(warm->controls.size()) == config.horizon) {
    const bool finite =
        std::all_of(warm->controls.begin(), warm->controls.end(),
                    [](const StepControl& u) { return u.IsFinite(); });
    if (finite) {
      std::vector<StepControl> shifted(config.horizon);
      for (int k = 0; k < config.horizon; ++k) {
        shifted[k] = warm->controls[std::min(k + std::max(shift, 0),
                                             config.horizon - 1)];
      }
      problem.set_initial_guess(problem.Pack(shifted));
    }
  }
  return problem;
}

namespace {

// Status and bookkeeping of a full decision vector returned by the SQP.
NlpSolution Classify(const NlpProblem& problem, const VectorXd& z,
                     nlp::SqpStatus sqp_status, double tol) {
  NlpSolution sol;
  sol.controls = problem.Controls(z);
  sol.states = problem.States(z);
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
    // Optimal only when the plan holds without any slack help.
    const VectorXd raw = problem.Bundle(z).values;
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

NlpSolution Solve(const NlpProblem& problem, const PlannerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](NlpSolution sol, int iterations) {
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

  // A quadratic slack price leaves slack ~ lambda / (2w) on every binding
  // DCBF row, so first look for a plan that needs none; the soft problem
  // only takes over when that fails.
  int iterations = 0;
  std::optional<NlpSolution> hard_sol;
  if (problem.num_slacks() > 0) {
    const nlp::PinnedTailProblem hard(problem);
    const nlp::SqpResult result = nlp::SolveSqp(
        hard, problem.initial_guess().head(hard.num_variables()), options);
    iterations += result.iterations;
    hard_sol = Classify(problem, hard.Embed(result.z), result.status, tol);
    if (hard_sol->status == SolverStatus::kOptimal) {
      return finish(std::move(*hard_sol), iterations);
    }
  }

  const nlp::SqpResult result =
      nlp::SolveSqp(problem, problem.initial_guess(), options);
  iterations += result.iterations;
  NlpSolution sol = Classify(problem, result.z, result.status, tol);
  // Neither run converged: both are points of the soft problem, keep the
  // cheaper feasible one.
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

NlpSolution Plan(const LipState& x_cur, const StepControl& u_cur,
                 StanceFoot stance_cur, double t_rem,
                 std::span<const Obstacle> obstacles,
                 const PlannerConfig& config, const NlpSolution* warm,
                 int shift) {
  const LipState x0 = PreprocessState(x_cur, u_cur, t_rem, config.lip);
  const std::vector<Obstacle> inflated =
      InflateAll(obstacles, config.cbf.inflation_margin);
  const NlpProblem problem =
      Assemble(x0, Opposite(stance_cur), inflated, config, warm, shift);
  return Solve(problem, config);
}

LipMpcPlanner::LipMpcPlanner(PlannerConfig config)
    : config_(std::move(config)) {
  config_.Validate();
}

NlpSolution LipMpcPlanner::Plan(const LipState& x_cur, const StepControl& u_cur,
                                StanceFoot stance_cur, double t_rem,
                                std::span<const Obstacle> obstacles,
                                int shift) {
  NlpSolution sol = lipnav::Plan(x_cur, u_cur, stance_cur, t_rem, obstacles,
                                 config_, last_ ? &*last_ : nullptr, shift);
  last_ = sol;
  return sol;
}

}  // namespace lipnav
