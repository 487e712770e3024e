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

#include "lipnav/lip_model.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lipnav/angles.h"

namespace lipnav {

LipParams::LipParams(double com_height, double gravity, double step_duration)
    : com_height_(com_height),
      gravity_(gravity),
      step_duration_(step_duration) {
  if (!std::isfinite(com_height) || !std::isfinite(gravity) ||
      !std::isfinite(step_duration)) {
    throw std::invalid_argument("LipParams: non-finite parameter");
  }
  if (com_height <= 0.0 || gravity <= 0.0 || step_duration <= 0.0) {
    throw std::invalid_argument(
        "LipParams: com_height, gravity and step_duration must be positive");
  }
  beta_ = std::sqrt(gravity_ / com_height_);
}

Vec5 LipState::ToVector() const {
  Vec5 v;
  v << p_x, v_x, p_y, v_y, theta;
  return v;
}

LipState LipState::FromVector(const Vec5& v) {
  return {v(0), v(1), v(2), v(3), v(4)};
}

bool LipState::IsFinite() const { return ToVector().allFinite(); }

bool StepControl::IsFinite() const { return ToVector().allFinite(); }

const char* StanceName(StanceFoot s) {
  return s == StanceFoot::kLeft ? "Left" : "Right";
}

StepMatrices ComputeStepMatrices(const LipParams& params, double duration) {
  if (!std::isfinite(duration) || duration < 0.0) {
    throw std::invalid_argument("ComputeStepMatrices: invalid duration " +
                                std::to_string(duration));
  }
  const double beta = params.beta();
  const double ch = std::cosh(beta * duration);
  const double sh = std::sinh(beta * duration);

  StepMatrices m;
  m.a_d << ch, sh / beta, beta * sh, ch;
  m.b_d << 1.0 - ch, -beta * sh;

  m.a.setZero();
  m.a.block<2, 2>(0, 0) = m.a_d;
  m.a.block<2, 2>(2, 2) = m.a_d;
  m.a(4, 4) = 1.0;
  m.b.setZero();
  m.b.block<2, 1>(0, 0) = m.b_d;
  m.b.block<2, 1>(2, 1) = m.b_d;
  m.b(4, 2) = 1.0;
  return m;
}

namespace {

LipState Flow(const LipState& x, const Vec2& foot, double heading_increment,
              const StepMatrices& m) {
  const Eigen::Vector2d along_x =
      m.a_d * Eigen::Vector2d(x.p_x, x.v_x) + m.b_d * foot.x();
  const Eigen::Vector2d along_y =
      m.a_d * Eigen::Vector2d(x.p_y, x.v_y) + m.b_d * foot.y();
  return {along_x(0), along_x(1), along_y(0), along_y(1),
          WrapAngle(x.theta + heading_increment)};
}

}  // namespace

LipState StepDynamics(const LipState& x, const StepControl& u,
                      const LipParams& params) {
  const StepMatrices m = ComputeStepMatrices(params, params.step_duration());
  return Flow(x, u.foot(), u.omega, m);
}

LipState IntegrateWithinStep(const LipState& x, const Vec2& stance_foot,
                             double omega, double t_rem,
                             const LipParams& params) {
  const double period = params.step_duration();
  if (!(t_rem >= 0.0 && t_rem <= period)) {
    throw std::out_of_range("IntegrateWithinStep: t_rem " +
                            std::to_string(t_rem) + " outside [0, T]");
  }
  if (t_rem == 0.0) return x;
  const StepMatrices m = ComputeStepMatrices(params, t_rem);
  return Flow(x, stance_foot, omega * (t_rem / period), m);
}

}  // namespace lipnav
