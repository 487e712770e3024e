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

#include "lipnav/obstacle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lipnav {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

ConicCoefficients EllipseCoefficients(double semi_major, double semi_minor,
                                      double rotation) {
  if (!std::isfinite(semi_major) || !std::isfinite(semi_minor) ||
      !std::isfinite(rotation) || !(semi_minor > 0.0) ||
      semi_major < semi_minor) {
    throw std::invalid_argument(
        "EllipseCoefficients: require semi_major >= semi_minor > 0");
  }
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const double a2 = semi_major * semi_major;
  const double b2 = semi_minor * semi_minor;
  // b^2 x'^2 + a^2 y'^2 = a^2 b^2 with (x', y') the body-frame offsets.
  return {b2 * c * c + a2 * s * s, 2.0 * c * s * (b2 - a2),
          b2 * s * s + a2 * c * c, semi_major * semi_minor};
}

Obstacle Obstacle::Circle(const Vec2& center, double radius) {
  if (!center.allFinite() || !std::isfinite(radius) || radius <= 0.0) {
    throw std::invalid_argument("Obstacle::Circle: radius must be positive");
  }
  return Obstacle(center, CircleShape{radius});
}

Obstacle Obstacle::Ellipse(const Vec2& center, double semi_major,
                           double semi_minor, double rotation) {
  if (!center.allFinite()) {
    throw std::invalid_argument("Obstacle::Ellipse: non-finite center");
  }
  EllipseShape shape{semi_major, semi_minor, rotation,
                     EllipseCoefficients(semi_major, semi_minor, rotation)};
  return Obstacle(center, shape);
}

bool operator==(const Obstacle& lhs, const Obstacle& rhs) {
  if (lhs.center_ != rhs.center_) return false;
  if (lhs.is_circle() != rhs.is_circle()) return false;
  if (lhs.is_circle()) return lhs.circle().radius == rhs.circle().radius;
  const EllipseShape& a = lhs.ellipse();
  const EllipseShape& b = rhs.ellipse();
  return a.semi_major == b.semi_major && a.semi_minor == b.semi_minor &&
         a.rotation == b.rotation;
}

double BarrierValue(const Obstacle& obstacle, const Vec2& p) {
  const double dx = p.x() - obstacle.center().x();
  const double dy = p.y() - obstacle.center().y();
  return std::visit(Overloaded{[&](const CircleShape& c) {
                                 return dx * dx + dy * dy - c.radius * c.radius;
                               },
                               [&](const EllipseShape& e) {
                                 const ConicCoefficients& k = e.conic;
                                 return k.a * dx * dx + k.b * dx * dy +
                                        k.c * dy * dy - k.d * k.d;
                               }},
                    obstacle.shape());
}

Vec2 BarrierGradient(const Obstacle& obstacle, const Vec2& p) {
  const double dx = p.x() - obstacle.center().x();
  const double dy = p.y() - obstacle.center().y();
  return std::visit(
      Overloaded{[&](const CircleShape&) { return Vec2(2.0 * dx, 2.0 * dy); },
                 [&](const EllipseShape& e) {
                   const ConicCoefficients& k = e.conic;
                   return Vec2(2.0 * k.a * dx + k.b * dy,
                               k.b * dx + 2.0 * k.c * dy);
                 }},
      obstacle.shape());
}

Obstacle Inflate(const Obstacle& obstacle, double margin) {
  if (!std::isfinite(margin) || margin < 0.0) {
    throw std::invalid_argument("Inflate: margin must be non-negative");
  }
  if (margin == 0.0) return obstacle;
  if (obstacle.is_circle()) {
    return Obstacle::Circle(obstacle.center(),
                            obstacle.circle().radius + margin);
  }
  const EllipseShape& e = obstacle.ellipse();
  return Obstacle::Ellipse(obstacle.center(), e.semi_major + margin,
                           e.semi_minor + margin, e.rotation);
}

std::vector<Obstacle> InflateAll(std::span<const Obstacle> obstacles,
                                 double margin) {
  std::vector<Obstacle> out;
  out.reserve(obstacles.size());
  for (const Obstacle& o : obstacles) out.push_back(Inflate(o, margin));
  return out;
}

bool ContainsPoint(const Obstacle& obstacle, const Vec2& p) {
  const Vec2 d = p - obstacle.center();
  if (obstacle.is_circle()) return d.norm() < obstacle.circle().radius;
  const EllipseShape& e = obstacle.ellipse();
  const double c = std::cos(e.rotation);
  const double s = std::sin(e.rotation);
  const double along = c * d.x() + s * d.y();
  const double across = -s * d.x() + c * d.y();
  return (along / e.semi_major) * (along / e.semi_major) +
             (across / e.semi_minor) * (across / e.semi_minor) <
         1.0;
}

double MinBarrier(std::span<const Obstacle> obstacles, const Vec2& p) {
  double h = std::numeric_limits<double>::infinity();
  for (const Obstacle& o : obstacles) h = std::min(h, BarrierValue(o, p));
  return h;
}

}  // namespace lipnav
