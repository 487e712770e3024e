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

// Safety constraints for footstep planning. Every family is a residual
// evaluator: a value >= 0 means satisfied. Gradients are analytic and taken
// with respect to the state (p_x, v_x, p_y, v_y, theta) and the step control
// (f_x, f_y, omega).

#ifndef LIPNAV_SAFETY_CONSTRAINTS_H_
#define LIPNAV_SAFETY_CONSTRAINTS_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "lipnav/angles.h"
#include "lipnav/lip_model.h"
#include "lipnav/obstacle.h"

namespace lipnav {

struct KinematicLimits {
  double v_x_min = 0.4;
  double v_x_max = 0.8;
  double v_y_min = 0.15;
  double v_y_max = 0.35;
  double leg_reach_max = 0.3;
  double turn_rate_max = kPi / 16.0;  // rad per step
  double alpha = 3.6;

  // Throws std::invalid_argument when an invariant is broken.
  void Validate() const;
};

struct CbfConfig {
  double gamma = 0.3;
  double inflation_margin = 0.4;

  void Validate() const;
};

// Lower floor on the squared CoM-to-foot distance; closes the strict
// inequality 0 < d^2.
inline constexpr double kMinFootDistanceSq = 1e-4;
// |omega| is evaluated as sqrt(omega^2 + eps^2).
inline constexpr double kAbsSmoothing = 1e-6;

template <int Rows>
struct StateResiduals {
  Eigen::Matrix<double, Rows, 1> value;
  Eigen::Matrix<double, Rows, 5> d_state;
};

template <int Rows>
struct StepResiduals {
  Eigen::Matrix<double, Rows, 1> value;
  Eigen::Matrix<double, Rows, 5> d_state;
  Eigen::Matrix<double, Rows, 3> d_control;
};

inline double DcbfResidual(double h_next, double h_cur, double gamma) {
  return h_next + (gamma - 1.0) * h_cur;
}

// Body-frame velocity bounds. Rows: longitudinal lower, longitudinal upper,
// lateral lower, lateral upper. Right stance keeps the lateral component in
// [v_y_min, v_y_max]; left stance in [-v_y_max, -v_y_min].
StateResiduals<4> VelocityResiduals(const LipState& x, StanceFoot stance,
                                    const KinematicLimits& lim);

// Rows: L_max^2 - d^2, d^2 - kMinFootDistanceSq.
StepResiduals<2> ReachabilityResiduals(const LipState& x, const StepControl& u,
                                       const KinematicLimits& lim);

// Rows: Omega_max - omega, omega + Omega_max.
StepResiduals<2> TurnRateResiduals(const StepControl& u,
                                   const KinematicLimits& lim);

// m = (alpha / pi) |omega| + v_long. Rows: v_x_max - m, m - v_x_min.
StepResiduals<2> ManeuverabilityResiduals(const LipState& x,
                                          const StepControl& u,
                                          const KinematicLimits& lim);

enum class RowFamily {
  kDcbf,
  kReachability,
  kTurnRate,
  kManeuverability,
  kVelocity,
};

struct RowInfo {
  RowFamily family;
  int step;      // k in [0, N)
  int obstacle;  // DCBF rows only, -1 otherwise
};

struct BundleOptions {
  bool maneuverability = true;
};

// Residuals of the whole horizon and their Jacobian with respect to the
// stacked variables [x_1 .. x_N, u_0 .. u_{N-1}] (5N + 3N columns). Per step
// k the rows are: one DCBF row per obstacle (h at x_k and x_{k+1}),
// reachability(x_k, u_k), turn rate(u_k), maneuverability(x_k, u_k) and
// velocity at x_{k+1} with the stance of step k.
struct ConstraintBundle {
  Eigen::VectorXd values;
  Eigen::MatrixXd jacobian;
  std::vector<RowInfo> rows;

  int horizon = 0;

  int state_column(int k) const { return 5 * (k - 1); }  // k in [1, N]
  int control_column(int k) const { return 5 * horizon + 3 * k; }
};

int RowsPerStep(int num_obstacles, const BundleOptions& options);

// Throws std::invalid_argument on an empty horizon or mismatched sizes.
ConstraintBundle EvaluateConstraintBundle(
    const LipState& x0, std::span<const LipState> states,
    std::span<const StepControl> controls, StanceFoot stance0,
    std::span<const Obstacle> obstacles, const KinematicLimits& lim,
    const CbfConfig& cbf, const BundleOptions& options = {});

}  // namespace lipnav

#endif  // LIPNAV_SAFETY_CONSTRAINTS_H_
