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

// Seeded random obstacle fields.

#ifndef LIPNAV_ENVIRONMENT_H_
#define LIPNAV_ENVIRONMENT_H_

#include <cstdint>
#include <vector>

#include "lipnav/lip_model.h"
#include "lipnav/obstacle.h"

namespace lipnav {

// splitmix64 stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next();
  // Uniform on [0, 1) from the top 53 bits.
  double Uniform();
  // Standard normal, Box-Muller on two uniforms.
  double Gaussian();

 private:
  std::uint64_t state_;
};

struct Bounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 10.0;
  double y_max = 10.0;

  bool IsValid() const;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct Environment {
  std::vector<Obstacle> obstacles;  // true geometry
  Vec2 start{0.0, 0.0};
  Vec2 goal{10.0, 10.0};
  Bounds bounds;
  std::uint64_t seed = 0;

  friend bool operator==(const Environment& lhs, const Environment& rhs);
};

// Extra distance kept between start/goal and every inflated obstacle.
inline constexpr double kEndpointClearance = 0.2;
inline constexpr int kMaxPlacementAttempts = 1000;

// Each obstacle is a circle (radius in [0.3, 0.8]) or an ellipse (semi-axes
// in [0.3, 1.0], rotation in [0, pi)) with equal odds, centered in the
// bounds shrunk by 1 m. Draws whose obstacle, inflated by margin plus
// kEndpointClearance, contains the start or goal are redrawn. Throws
// std::runtime_error when an obstacle cannot be placed and
// std::invalid_argument on bad input.
Environment GenerateEnvironment(std::uint64_t seed, int num_obstacles,
                                const Bounds& bounds, const Vec2& start,
                                const Vec2& goal, double margin = 0.4);

}  // namespace lipnav

#endif  // LIPNAV_ENVIRONMENT_H_
