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

#include "lipnav/safety_constraints.h"

#include <cmath>
#include <stdexcept>

namespace lipnav {
namespace {

// State vector indices.
constexpr int kPx = 0;
constexpr int kVx = 1;
constexpr int kPy = 2;
constexpr int kVy = 3;
constexpr int kTheta = 4;

}  // namespace

void KinematicLimits::Validate() const {
  const bool ok = v_x_min <= v_x_max && v_y_min > 0.0 && v_y_min <= v_y_max &&
                  leg_reach_max > 0.0 && turn_rate_max > 0.0 && alpha >= 0.0;
  if (!ok) throw std::invalid_argument("KinematicLimits: invalid bounds");
}

void CbfConfig::Validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("CbfConfig: gamma must lie in (0, 1]");
  }
  if (!(inflation_margin >= 0.0)) {
    throw std::invalid_argument("CbfConfig: negative inflation margin");
  }
}

StateResiduals<4> VelocityResiduals(const LipState& x, StanceFoot stance,
                                    const KinematicLimits& lim) {
  const double c = std::cos(x.theta);
  const double s = std::sin(x.theta);
  const double v_long = c * x.v_x + s * x.v_y;
  const double v_lat = -s * x.v_x + c * x.v_y;

  Eigen::Matrix<double, 1, 5> d_long = Eigen::Matrix<double, 1, 5>::Zero();
  d_long(kVx) = c;
  d_long(kVy) = s;
  d_long(kTheta) = v_lat;
  Eigen::Matrix<double, 1, 5> d_lat = Eigen::Matrix<double, 1, 5>::Zero();
  d_lat(kVx) = -s;
  d_lat(kVy) = c;
  d_lat(kTheta) = -v_long;

  double lat_lo = lim.v_y_min;
  double lat_hi = lim.v_y_max;
  if (stance == StanceFoot::kLeft) {
    lat_lo = -lim.v_y_max;
    lat_hi = -lim.v_y_min;
  }

  StateResiduals<4> r;
  r.value << v_long - lim.v_x_min, lim.v_x_max - v_long, v_lat - lat_lo,
      lat_hi - v_lat;
  r.d_state.row(0) = d_long;
  r.d_state.row(1) = -d_long;
  r.d_state.row(2) = d_lat;
  r.d_state.row(3) = -d_lat;
  return r;
}

StepResiduals<2> ReachabilityResiduals(const LipState& x, const StepControl& u,
                                       const KinematicLimits& lim) {
  const double dx = x.p_x - u.f_x;
  const double dy = x.p_y - u.f_y;
  const double d2 = dx * dx + dy * dy;

  StepResiduals<2> r;
  r.value << lim.leg_reach_max * lim.leg_reach_max - d2,
      d2 - kMinFootDistanceSq;
  r.d_state.setZero();
  r.d_control.setZero();
  r.d_state(1, kPx) = 2.0 * dx;
  r.d_state(1, kPy) = 2.0 * dy;
  r.d_control(1, 0) = -2.0 * dx;
  r.d_control(1, 1) = -2.0 * dy;
  r.d_state.row(0) = -r.d_state.row(1);
  r.d_control.row(0) = -r.d_control.row(1);
  return r;
}

StepResiduals<2> TurnRateResiduals(const StepControl& u,
                                   const KinematicLimits& lim) {
  StepResiduals<2> r;
  r.value << lim.turn_rate_max - u.omega, u.omega + lim.turn_rate_max;
  r.d_state.setZero();
  r.d_control.setZero();
  r.d_control(0, 2) = -1.0;
  r.d_control(1, 2) = 1.0;
  return r;
}

StepResiduals<2> ManeuverabilityResiduals(const LipState& x,
                                          const StepControl& u,
                                          const KinematicLimits& lim) {
  const double c = std::cos(x.theta);
  const double s = std::sin(x.theta);
  const double v_long = x.v_x * c + x.v_y * s;
  const double abs_omega =
      std::sqrt(u.omega * u.omega + kAbsSmoothing * kAbsSmoothing);
  const double k = lim.alpha / kPi;
  const double m = k * abs_omega + v_long;

  Eigen::Matrix<double, 1, 5> dm_state = Eigen::Matrix<double, 1, 5>::Zero();
  dm_state(kVx) = c;
  dm_state(kVy) = s;
  dm_state(kTheta) = -x.v_x * s + x.v_y * c;
  const double dm_omega = k * u.omega / abs_omega;

  StepResiduals<2> r;
  r.value << lim.v_x_max - m, m - lim.v_x_min;
  r.d_state.row(0) = -dm_state;
  r.d_state.row(1) = dm_state;
  r.d_control.setZero();
  r.d_control(0, 2) = -dm_omega;
  r.d_control(1, 2) = dm_omega;
  return r;
}

int RowsPerStep(int num_obstacles, const BundleOptions& options) {
  return num_obstacles + 2 + 2 + (options.maneuverability ? 2 : 0) + 4;
}

ConstraintBundle EvaluateConstraintBundle(
    const LipState& x0, std::span<const LipState> states,
    std::span<const StepControl> controls, StanceFoot stance0,
    std::span<const Obstacle> obstacles, const KinematicLimits& lim,
    const CbfConfig& cbf, const BundleOptions& options) {
  const int horizon = static_cast<int>(controls.size());
  if (horizon == 0) {
    throw std::invalid_argument("EvaluateConstraintBundle: empty horizon");
  }
  if (states.size() != controls.size()) {
    throw std::invalid_argument(
        "EvaluateConstraintBundle: need one state per control");
  }
  const int num_obstacles = static_cast<int>(obstacles.size());
  const int per_step = RowsPerStep(num_obstacles, options);

  ConstraintBundle out;
  out.horizon = horizon;
  out.values.resize(per_step * horizon);
  out.jacobian.setZero(per_step * horizon, 8 * horizon);
  out.rows.reserve(per_step * horizon);

  int row = 0;
  auto place_state = [&](int k, const auto& block, int nrows) {
    // x_0 is fixed and has no column.
    if (k == 0) return;
    out.jacobian.block(row, out.state_column(k), nrows, 5) += block;
  };

  for (int k = 0; k < horizon; ++k) {
    const LipState& xk = k == 0 ? x0 : states[k - 1];
    const LipState& xn = states[k];
    const StepControl& uk = controls[k];

    for (int j = 0; j < num_obstacles; ++j) {
      const Obstacle& obs = obstacles[j];
      const double h_cur = BarrierValue(obs, xk.position());
      const double h_next = BarrierValue(obs, xn.position());
      out.values(row) = DcbfResidual(h_next, h_cur, cbf.gamma);
      const Vec2 g_next = BarrierGradient(obs, xn.position());
      out.jacobian(row, out.state_column(k + 1) + kPx) += g_next.x();
      out.jacobian(row, out.state_column(k + 1) + kPy) += g_next.y();
      if (k > 0) {
        const Vec2 g_cur = BarrierGradient(obs, xk.position());
        out.jacobian(row, out.state_column(k) + kPx) +=
            (cbf.gamma - 1.0) * g_cur.x();
        out.jacobian(row, out.state_column(k) + kPy) +=
            (cbf.gamma - 1.0) * g_cur.y();
      }
      out.rows.push_back({RowFamily::kDcbf, k, j});
      ++row;
    }

    auto emit_step = [&](const StepResiduals<2>& r, RowFamily family) {
      out.values.segment<2>(row) = r.value;
      place_state(k, r.d_state, 2);
      out.jacobian.block(row, out.control_column(k), 2, 3) = r.d_control;
      out.rows.push_back({family, k, -1});
      out.rows.push_back({family, k, -1});
      row += 2;
    };
    emit_step(ReachabilityResiduals(xk, uk, lim), RowFamily::kReachability);
    emit_step(TurnRateResiduals(uk, lim), RowFamily::kTurnRate);
    if (options.maneuverability) {
      emit_step(ManeuverabilityResiduals(xk, uk, lim),
                RowFamily::kManeuverability);
    }

    const StateResiduals<4> vel =
        VelocityResiduals(xn, StanceAtStep(stance0, k), lim);
    out.values.segment<4>(row) = vel.value;
    out.jacobian.block(row, out.state_column(k + 1), 4, 5) = vel.d_state;
    for (int i = 0; i < 4; ++i)
      out.rows.push_back({RowFamily::kVelocity, k, -1});
    row += 4;
  }
  return out;
}

}  // namespace lipnav
