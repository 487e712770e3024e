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

// Oracles and helpers shared by the tests and the acceptance checks.

#ifndef LIPNAV_TESTS_TEST_SUPPORT_H_
#define LIPNAV_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Core>

#include "lipnav/angles.h"
#include "lipnav/lip_model.h"
#include "lipnav/lip_mpc_planner.h"
#include "lipnav/obstacle.h"

namespace lipnav::testing {

inline double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline LipState RandomState(std::mt19937_64& rng) {
  return {Uniform(rng, -5.0, 5.0), Uniform(rng, -1.0, 1.0),
          Uniform(rng, -5.0, 5.0), Uniform(rng, -1.0, 1.0),
          Uniform(rng, -kPi + 1e-3, kPi)};
}

// Foot within 0.4 m of the CoM.
inline StepControl RandomControl(std::mt19937_64& rng, const LipState& x) {
  return {x.p_x + Uniform(rng, -0.4, 0.4), x.p_y + Uniform(rng, -0.4, 0.4),
          Uniform(rng, -0.3, 0.3)};
}

inline Obstacle RandomObstacle(std::mt19937_64& rng) {
  const Vec2 c(Uniform(rng, -3.0, 3.0), Uniform(rng, -3.0, 3.0));
  if (Uniform(rng, 0.0, 1.0) < 0.5) {
    return Obstacle::Circle(c, Uniform(rng, 0.3, 1.2));
  }
  const double a = Uniform(rng, 0.3, 1.4);
  const double b = Uniform(rng, 0.3, a);
  return Obstacle::Ellipse(c, a, b, Uniform(rng, 0.0, kPi));
}

// Classical RK4 on p'' = beta^2 (p - f) for one axis; returns (p, v).
inline Eigen::Vector2d Rk4Axis(double p, double v, double f, double beta,
                               double duration, double h) {
  const double b2 = beta * beta;
  auto deriv = [&](const Eigen::Vector2d& s) {
    return Eigen::Vector2d(s(1), b2 * (s(0) - f));
  };
  Eigen::Vector2d s(p, v);
  const int n = static_cast<int>(std::llround(duration / h));
  const double dt = duration / n;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d k1 = deriv(s);
    const Eigen::Vector2d k2 = deriv(s + 0.5 * dt * k1);
    const Eigen::Vector2d k3 = deriv(s + 0.5 * dt * k2);
    const Eigen::Vector2d k4 = deriv(s + dt * k3);
    s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s;
}

// Full-step oracle: RK4 per axis with the foot fixed, heading + omega.
inline LipState Rk4Step(const LipState& x, const StepControl& u,
                        const LipParams& params, double h = 1e-4) {
  const double t = params.step_duration();
  const Eigen::Vector2d sx = Rk4Axis(x.p_x, x.v_x, u.f_x, params.beta(), t, h);
  const Eigen::Vector2d sy = Rk4Axis(x.p_y, x.v_y, u.f_y, params.beta(), t, h);
  return {sx(0), sx(1), sy(0), sy(1), WrapAngle(x.theta + u.omega)};
}

// |a - b| / max(|a|, |b|, 1).
inline double RelErr(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

// Central-difference Jacobian of f at z.
inline Eigen::MatrixXd NumericJacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& z, double step = 1e-6) {
  const Eigen::VectorXd f0 = f(z);
  Eigen::MatrixXd jac(f0.size(), z.size());
  for (int i = 0; i < z.size(); ++i) {
    Eigen::VectorXd zp = z, zm = z;
    zp(i) += step;
    zm(i) -= step;
    jac.col(i) = (f(zp) - f(zm)) / (2.0 * step);
  }
  return jac;
}

// Largest RelErr between two equally sized matrices.
inline double MaxRelErr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      worst = std::max(worst, RelErr(a(i, j), b(i, j)));
    }
  }
  return worst;
}

inline Vec2 Rotate(const Vec2& p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y()};
}

inline LipState RotateState(const LipState& x, double angle) {
  const Vec2 p = Rotate(x.position(), angle);
  const Vec2 v = Rotate(x.velocity(), angle);
  return {p.x(), v.x(), p.y(), v.y(), WrapAngle(x.theta + angle)};
}

inline StepControl RotateControl(const StepControl& u, double angle) {
  const Vec2 f = Rotate(u.foot(), angle);
  return {f.x(), f.y(), u.omega};
}

inline Obstacle RotateObstacle(const Obstacle& obs, double angle) {
  const Vec2 c = Rotate(obs.center(), angle);
  if (obs.is_circle()) return Obstacle::Circle(c, obs.circle().radius);
  const EllipseShape& e = obs.ellipse();
  return Obstacle::Ellipse(c, e.semi_major, e.semi_minor, e.rotation + angle);
}

// End-of-step state of a steady gait: body velocity (speed, sway) with the
// sign of sway set by the stance that just ended.
inline LipState Cruise(const Vec2& p, double theta, double speed, double sway) {
  const Vec2 v = testing::Rotate(Vec2(speed, sway), theta);
  return {p.x(), v.x(), p.y(), v.y(), WrapAngle(theta)};
}

// Random end-of-left-stance state, so the next step is a right stance.
inline LipState RandomCruise(std::mt19937_64& rng) {
  return Cruise({Uniform(rng, -3, 3), Uniform(rng, -3, 3)},
                Uniform(rng, -kPi, kPi), Uniform(rng, 0.45, 0.75),
                -Uniform(rng, 0.17, 0.33));
}

inline Vec2 RandomGoal(std::mt19937_64& rng, const LipState& x) {
  const double phi = Uniform(rng, -kPi, kPi);
  const double r = Uniform(rng, 3.0, 10.0);
  return x.position() + r * Vec2(std::cos(phi), std::sin(phi));
}

// Best feasible objective over a 50^3 grid of (f_x, f_y, omega) at N = 1.
inline double GridBest(const NlpProblem& prob, const PlannerConfig& config) {
  const LipState& x0 = prob.initial_state();
  const double reach = config.limits.leg_reach_max;
  const double turn = config.limits.turn_rate_max;
  double best = std::numeric_limits<double>::infinity();
  constexpr int kN = 50;
  for (int i = 0; i < kN; ++i) {
    for (int j = 0; j < kN; ++j) {
      for (int k = 0; k < kN; ++k) {
        const StepControl u{x0.p_x - reach + 2.0 * reach * i / (kN - 1),
                            x0.p_y - reach + 2.0 * reach * j / (kN - 1),
                            -turn + 2.0 * turn * k / (kN - 1)};
        const std::vector<StepControl> us = {u};
        const Eigen::VectorXd z = prob.Pack(us);
        if (prob.Bundle(z).values.minCoeff() < 0.0) continue;
        best = std::min(best, prob.Objective(z));
      }
    }
  }
  return best;
}

}  // namespace lipnav::testing

#endif  // LIPNAV_TESTS_TEST_SUPPORT_H_
