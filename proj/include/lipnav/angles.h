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

#ifndef LIPNAV_ANGLES_H_
#define LIPNAV_ANGLES_H_

#include <cmath>
#include <numbers>

namespace lipnav {

inline constexpr double kPi = std::numbers::pi;

// Maps an angle to (-pi, pi].
inline double WrapAngle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

}  // namespace lipnav

#endif  // LIPNAV_ANGLES_H_
