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

// Small dense nonlinear programs
//
//   min f(z)  s.t.  c(z) >= 0,  z >= lower
//
// solved by an l1-penalty SQP (elastic QP subproblems, merit line search
// with second-order correction). The Lagrangian Hessian is built from
// central differences of analytic gradients and made positive definite by
// eigenvalue modification. QP subproblems are solved with a Mehrotra
// predictor-corrector interior-point method. Everything is deterministic:
// no wall-clock cutoffs, no randomness.

#ifndef LIPNAV_SQP_SOLVER_H_
#define LIPNAV_SQP_SOLVER_H_

#include <limits>
#include <vector>

#include <Eigen/Core>

namespace lipnav::nlp {

struct Evaluation {
  double objective = 0.0;
  Eigen::VectorXd gradient;
  Eigen::VectorXd constraints;
  Eigen::MatrixXd jacobian;
};

class DenseProblem {
 public:
  virtual ~DenseProblem() = default;

  virtual int num_variables() const = 0;
  virtual int num_constraints() const = 0;
  virtual void Evaluate(const Eigen::VectorXd& z, Evaluation* out) const = 0;

  // Elastic rows may be violated in a QP subproblem at an l1 price; the
  // others must stay linearly feasible on their own (e.g. via slacks).
  virtual bool IsElastic(int /*row*/) const { return true; }

  // Variables [num_curved_variables(), n) must enter the constraints
  // linearly and the objective separably with a constant second derivative
  // FixedCurvature(i) > 0. Their Hessian block is not differenced.
  virtual int num_curved_variables() const { return num_variables(); }
  virtual double FixedCurvature(int /*i*/) const { return 0.0; }

  virtual double LowerBound(int /*i*/) const {
    return -std::numeric_limits<double>::infinity();
  }
};

// The variables [base.num_curved_variables(), n) of `base` pinned at zero,
// with every row elastic. For problems whose tail variables are slacks this
// is the problem with every slacked row made hard.
class PinnedTailProblem : public DenseProblem {
 public:
  explicit PinnedTailProblem(const DenseProblem& base)
      : base_(base), n_(base.num_curved_variables()) {}

  // Full-length vector of `base` with the tail at zero.
  Eigen::VectorXd Embed(const Eigen::VectorXd& z) const;

  int num_variables() const override { return n_; }
  int num_constraints() const override { return base_.num_constraints(); }
  void Evaluate(const Eigen::VectorXd& z, Evaluation* out) const override;
  double LowerBound(int i) const override { return base_.LowerBound(i); }

 private:
  const DenseProblem& base_;
  int n_;
};

// ---------------------------------------------------------------------------
// QP subproblem:  min 1/2 d'Hd + g'd + penalty * sum(t)
//                 s.t. A d + b + t >= 0 (t >= 0 on elastic rows, else t = 0)

struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<char> elastic;
  double penalty = 1.0;
};

struct QpResult {
  Eigen::VectorXd step;
  Eigen::VectorXd multipliers;
  Eigen::VectorXd elastic;  // t, zero on non-elastic rows
  bool converged = false;
  int iterations = 0;
};

struct QpOptions {
  double tolerance = 1e-10;
  int max_iterations = 80;
};

// H must be symmetric positive definite.
QpResult SolveQp(const QpProblem& qp, const QpOptions& options = {});

// ---------------------------------------------------------------------------

struct SqpOptions {
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-6;
  int max_iterations = 100;
  double initial_penalty = 1e3;
  double max_penalty = 1e9;
  double hessian_fd_step = 1e-6;
};

enum class SqpStatus {
  kConverged,
  // Stationary for the l1 merit but with constraint violation left.
  kInfeasible,
  kMaxIterations,
  kLineSearchFailure,
  kNumericalError,
};

const char* SqpStatusName(SqpStatus status);

struct SqpResult {
  Eigen::VectorXd z;
  Eigen::VectorXd multipliers;  // one per constraint row
  double objective = 0.0;
  double max_violation = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  SqpStatus status = SqpStatus::kNumericalError;
};

// Returns the best iterate seen (feasible with lowest objective, else least
// violation) whenever the run does not converge.
SqpResult SolveSqp(const DenseProblem& problem, const Eigen::VectorXd& z0,
                   const SqpOptions& options = {});

}  // namespace lipnav::nlp

#endif  // LIPNAV_SQP_SOLVER_H_
