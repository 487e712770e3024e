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

#include "lipnav/sqp_solver.h"

#include <cmath>

#include <gtest/gtest.h>

namespace lipnav::nlp {
namespace {

TEST(Qp, InactiveConstraintGivesNewtonStep) {
  QpProblem qp;
  qp.hessian = Eigen::Matrix2d::Identity() * 2.0;
  qp.gradient = Eigen::Vector2d(-2.0, 4.0);
  qp.a = Eigen::MatrixXd(1, 2);
  qp.a << 1.0, 0.0;
  qp.b = Eigen::VectorXd::Constant(1, 10.0);
  qp.elastic = {0};
  const QpResult r = SolveQp(qp);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.step(0), 1.0, 1e-8);
  EXPECT_NEAR(r.step(1), -2.0, 1e-8);
  EXPECT_NEAR(r.multipliers(0), 0.0, 1e-8);
}

TEST(Qp, ActiveHardConstraint) {
  QpProblem qp;
  qp.hessian = Eigen::Matrix2d::Identity();
  qp.gradient = Eigen::Vector2d::Zero();
  qp.a = Eigen::MatrixXd(1, 2);
  qp.a << 1.0, 0.0;
  qp.b = Eigen::VectorXd::Constant(1, -1.0);
  qp.elastic = {0};
  const QpResult r = SolveQp(qp);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.step(0), 1.0, 1e-8);
  EXPECT_NEAR(r.step(1), 0.0, 1e-8);
  EXPECT_NEAR(r.multipliers(0), 1.0, 1e-6);
}

TEST(Qp, ElasticRowTradesViolationForPenalty) {
  QpProblem qp;
  qp.hessian = Eigen::Matrix2d::Identity();
  qp.gradient = Eigen::Vector2d::Zero();
  qp.a = Eigen::MatrixXd(1, 2);
  qp.a << 1.0, 0.0;
  qp.b = Eigen::VectorXd::Constant(1, -1.0);
  qp.elastic = {1};
  qp.penalty = 0.5;
  const QpResult r = SolveQp(qp);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.step(0), 0.5, 1e-7);
  EXPECT_NEAR(r.elastic(0), 0.5, 1e-7);
}

// min (x - 2)^2 + (y - 1)^2  s.t.  1 - x^2 - y^2 >= 0.
class Disk : public DenseProblem {
 public:
  int num_variables() const override { return 2; }
  int num_constraints() const override { return 1; }
  void Evaluate(const Eigen::VectorXd& z, Evaluation* out) const override {
    out->objective = std::pow(z(0) - 2.0, 2) + std::pow(z(1) - 1.0, 2);
    out->gradient = Eigen::Vector2d(2.0 * (z(0) - 2.0), 2.0 * (z(1) - 1.0));
    out->constraints = Eigen::VectorXd::Constant(1, 1.0 - z.squaredNorm());
    out->jacobian = -2.0 * z.transpose();
  }
};

TEST(Sqp, ProjectsOntoDisk) {
  const SqpResult r = SolveSqp(Disk(), Eigen::Vector2d(0.1, -0.3));
  ASSERT_EQ(r.status, SqpStatus::kConverged) << SqpStatusName(r.status);
  EXPECT_NEAR(r.z(0), 2.0 / std::sqrt(5.0), 1e-6);
  EXPECT_NEAR(r.z(1), 1.0 / std::sqrt(5.0), 1e-6);
  EXPECT_LE(r.max_violation, 1e-6);
  // Multiplier of the disk row: 2 (p - c) = -2 lambda p.
  EXPECT_NEAR(r.multipliers(0), std::sqrt(5.0) - 1.0, 1e-4);
}

TEST(Sqp, StartsFromInfeasiblePoint) {
  const SqpResult r = SolveSqp(Disk(), Eigen::Vector2d(3.0, 3.0));
  ASSERT_EQ(r.status, SqpStatus::kConverged) << SqpStatusName(r.status);
  EXPECT_NEAR(r.z.norm(), 1.0, 1e-6);
}

// x >= 1 and x <= 0 cannot both hold.
class Contradiction : public DenseProblem {
 public:
  int num_variables() const override { return 1; }
  int num_constraints() const override { return 2; }
  void Evaluate(const Eigen::VectorXd& z, Evaluation* out) const override {
    out->objective = z(0) * z(0);
    out->gradient = Eigen::VectorXd::Constant(1, 2.0 * z(0));
    out->constraints = Eigen::Vector2d(z(0) - 1.0, -z(0));
    out->jacobian = Eigen::Vector2d(1.0, -1.0);
  }
};

TEST(Sqp, ReportsInfeasibility) {
  const SqpResult r = SolveSqp(Contradiction(), Eigen::VectorXd::Zero(1));
  EXPECT_NE(r.status, SqpStatus::kConverged);
  EXPECT_GT(r.max_violation, 0.1);
  EXPECT_TRUE(r.z.allFinite());
}

// Bounded variable with a fixed-curvature block.
class Bounded : public DenseProblem {
 public:
  int num_variables() const override { return 2; }
  int num_constraints() const override { return 1; }
  void Evaluate(const Eigen::VectorXd& z, Evaluation* out) const override {
    out->objective = std::pow(z(0) - 3.0, 2) + 5.0 * z(1) * z(1);
    out->gradient = Eigen::Vector2d(2.0 * (z(0) - 3.0), 10.0 * z(1));
    // x <= 1 + s, s >= 0.
    out->constraints = Eigen::VectorXd::Constant(1, 1.0 + z(1) - z(0));
    out->jacobian = Eigen::RowVector2d(-1.0, 1.0);
  }
  bool IsElastic(int) const override { return false; }
  int num_curved_variables() const override { return 1; }
  double FixedCurvature(int) const override { return 10.0; }
  double LowerBound(int i) const override { return i == 1 ? 0.0 : -INFINITY; }
};

TEST(Sqp, HonorsBoundsAndFixedCurvature) {
  const SqpResult r = SolveSqp(Bounded(), Eigen::Vector2d(0.0, 0.0));
  ASSERT_EQ(r.status, SqpStatus::kConverged) << SqpStatusName(r.status);
  // Stationarity: 2 (x - 3) = -lambda, 10 s = lambda, x = 1 + s.
  EXPECT_NEAR(r.z(1), 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(r.z(0), 4.0 / 3.0, 1e-6);
}

TEST(Sqp, Deterministic) {
  const SqpResult a = SolveSqp(Disk(), Eigen::Vector2d(-0.7, 0.2));
  const SqpResult b = SolveSqp(Disk(), Eigen::Vector2d(-0.7, 0.2));
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.iterations, b.iterations);
}

}  // namespace
}  // namespace lipnav::nlp
