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

// 3D linear inverted pendulum with a heading state, expressed in the fixed
// world frame. The x and y axes evolve independently under the same
// hyperbolic step map; the heading is advanced by a per-step increment.

#ifndef LIPNAV_LIP_MODEL_H_
#define LIPNAV_LIP_MODEL_H_

#include <Eigen/Core>

namespace lipnav {

using Vec2 = Eigen::Vector2d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Vec3 = Eigen::Vector3d;

// Pendulum height, gravity and the fixed step duration. Validated on
// construction; beta = sqrt(g / H) is derived and cached.
class LipParams {
 public:
  LipParams() : LipParams(1.0, 9.81, 0.4) {}
  LipParams(double com_height, double gravity, double step_duration);

  double com_height() const { return com_height_; }
  double gravity() const { return gravity_; }
  double step_duration() const { return step_duration_; }
  double beta() const { return beta_; }

 private:
  double com_height_;
  double gravity_;
  double step_duration_;
  double beta_;
};

// CoM position/velocity in the world frame plus heading, theta in (-pi, pi].
struct LipState {
  double p_x = 0.0;
  double v_x = 0.0;
  double p_y = 0.0;
  double v_y = 0.0;
  double theta = 0.0;

  // Ordered (p_x, v_x, p_y, v_y, theta).
  Vec5 ToVector() const;
  static LipState FromVector(const Vec5& v);
  Vec2 position() const { return {p_x, p_y}; }
  Vec2 velocity() const { return {v_x, v_y}; }
  bool IsFinite() const;
};

// World-frame stance-foot position and the heading increment over one step
// (radians per step).
struct StepControl {
  double f_x = 0.0;
  double f_y = 0.0;
  double omega = 0.0;

  Vec3 ToVector() const { return {f_x, f_y, omega}; }
  static StepControl FromVector(const Vec3& v) { return {v(0), v(1), v(2)}; }
  Vec2 foot() const { return {f_x, f_y}; }
  bool IsFinite() const;
};

enum class StanceFoot { kLeft, kRight };

inline StanceFoot Opposite(StanceFoot s) {
  return s == StanceFoot::kLeft ? StanceFoot::kRight : StanceFoot::kLeft;
}

// Stance of step k when step 0 uses `first`.
inline StanceFoot StanceAtStep(StanceFoot first, int k) {
  return (k % 2 == 0) ? first : Opposite(first);
}

const char* StanceName(StanceFoot s);

struct StepMatrices {
  Eigen::Matrix2d a_d;
  Eigen::Vector2d b_d;
  Eigen::Matrix<double, 5, 5> a;
  Eigen::Matrix<double, 5, 3> b;
};

// Exact flow of the per-axis pendulum over `duration` seconds with the foot
// held fixed. Throws std::invalid_argument on a negative or non-finite
// duration.
StepMatrices ComputeStepMatrices(const LipParams& params, double duration);

// End-of-step state after a full step of the configured duration.
LipState StepDynamics(const LipState& x, const StepControl& u,
                      const LipParams& params);

// Advances the state by t_rem seconds with the given stance foot. The heading
// receives the fraction t_rem / T of the per-step increment. Requires
// 0 <= t_rem <= T.
LipState IntegrateWithinStep(const LipState& x, const Vec2& stance_foot,
                             double omega, double t_rem,
                             const LipParams& params);

}  // namespace lipnav

#endif  // LIPNAV_LIP_MODEL_H_
