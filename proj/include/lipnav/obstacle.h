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

#ifndef LIPNAV_OBSTACLE_H_
#define LIPNAV_OBSTACLE_H_

#include <span>
#include <variant>
#include <vector>

#include "lipnav/lip_model.h"

namespace lipnav {

// Conic A dx^2 + B dx dy + C dy^2 = D^2 about the obstacle center.
struct ConicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

// Coefficients of the ellipse with the given semi-axes whose major axis is
// rotated by `rotation` from world +x. Scaled so that D = semi_major *
// semi_minor. Throws std::invalid_argument unless
// semi_major >= semi_minor > 0.
ConicCoefficients EllipseCoefficients(double semi_major, double semi_minor,
                                      double rotation);

struct CircleShape {
  double radius = 0.0;
};

// Keeps the generating axes next to the conic so inflation stays exact.
struct EllipseShape {
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double rotation = 0.0;
  ConicCoefficients conic;
};

class Obstacle {
 public:
  static Obstacle Circle(const Vec2& center, double radius);
  static Obstacle Ellipse(const Vec2& center, double semi_major,
                          double semi_minor, double rotation);

  bool is_circle() const { return std::holds_alternative<CircleShape>(shape_); }
  const Vec2& center() const { return center_; }
  const CircleShape& circle() const { return std::get<CircleShape>(shape_); }
  const EllipseShape& ellipse() const { return std::get<EllipseShape>(shape_); }
  const std::variant<CircleShape, EllipseShape>& shape() const {
    return shape_;
  }

  friend bool operator==(const Obstacle& lhs, const Obstacle& rhs);

 private:
  Obstacle(const Vec2& center, std::variant<CircleShape, EllipseShape> shape)
      : center_(center), shape_(shape) {}

  Vec2 center_;
  std::variant<CircleShape, EllipseShape> shape_;
};

// Positive outside, zero on the boundary, negative inside.
double BarrierValue(const Obstacle& obstacle, const Vec2& p);
Vec2 BarrierGradient(const Obstacle& obstacle, const Vec2& p);

// Circle: radius + margin. Ellipse: each semi-axis + margin.
Obstacle Inflate(const Obstacle& obstacle, double margin);
std::vector<Obstacle> InflateAll(std::span<const Obstacle> obstacles,
                                 double margin);

// Geometric membership test from the parametric shape; independent of the
// conic coefficients.
bool ContainsPoint(const Obstacle& obstacle, const Vec2& p);

// Smallest barrier value over all obstacles, +inf when there are none.
double MinBarrier(std::span<const Obstacle> obstacles, const Vec2& p);

}  // namespace lipnav

#endif  // LIPNAV_OBSTACLE_H_
