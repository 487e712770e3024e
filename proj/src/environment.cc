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

#include "lipnav/environment.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lipnav/angles.h"

namespace lipnav {

std::uint64_t SplitMix64::Next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::Uniform() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

double SplitMix64::Gaussian() {
  const double u1 = 1.0 - Uniform();  // (0, 1]
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

bool Bounds::IsValid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min < x_max && y_min < y_max;
}

bool operator==(const Environment& lhs, const Environment& rhs) {
  return lhs.obstacles == rhs.obstacles && lhs.start == rhs.start &&
         lhs.goal == rhs.goal && lhs.bounds == rhs.bounds &&
         lhs.seed == rhs.seed;
}

Environment GenerateEnvironment(std::uint64_t seed, int num_obstacles,
                                const Bounds& bounds, const Vec2& start,
                                const Vec2& goal, double margin) {
  if (num_obstacles < 0) {
    throw std::invalid_argument("GenerateEnvironment: negative count");
  }
  if (!bounds.IsValid() || !(margin >= 0.0) || !start.allFinite() ||
      !goal.allFinite()) {
    throw std::invalid_argument("GenerateEnvironment: invalid arguments");
  }
  const double x_lo = bounds.x_min + 1.0;
  const double y_lo = bounds.y_min + 1.0;
  const double x_span = std::max(0.0, bounds.x_max - bounds.x_min - 2.0);
  const double y_span = std::max(0.0, bounds.y_max - bounds.y_min - 2.0);

  Environment env;
  env.start = start;
  env.goal = goal;
  env.bounds = bounds;
  env.seed = seed;
  SplitMix64 rng(seed);
  for (int i = 0; i < num_obstacles; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
      const bool circle = rng.Uniform() < 0.5;
      const Vec2 center(x_lo + x_span * rng.Uniform(),
                        y_lo + y_span * rng.Uniform());
      Obstacle obs = Obstacle::Circle(center, 1.0);
      if (circle) {
        obs = Obstacle::Circle(center, 0.3 + 0.5 * rng.Uniform());
      } else {
        const double a = 0.3 + 0.7 * rng.Uniform();
        const double b = 0.3 + 0.7 * rng.Uniform();
        obs = Obstacle::Ellipse(center, std::max(a, b), std::min(a, b),
                                kPi * rng.Uniform());
      }
      const Obstacle guard = Inflate(obs, margin + kEndpointClearance);
      if (ContainsPoint(guard, start) || ContainsPoint(guard, goal)) continue;
      env.obstacles.push_back(obs);
      placed = true;
      break;
    }
    if (!placed) {
      throw std::runtime_error(
          "GenerateEnvironment: could not place obstacle " + std::to_string(i));
    }
  }
  return env;
}

}  // namespace lipnav
