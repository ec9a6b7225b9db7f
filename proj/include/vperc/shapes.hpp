#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace vperc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double distance(Vec2 a, Vec2 b) { return std::sqrt(norm2(a - b)); }

/// Sides of an axis-parallel rectangle, listed so that index+1 is the next
/// side counterclockwise.
enum class Side : int { Bottom = 0, Right = 1, Top = 2, Left = 3 };

inline constexpr Side kAllSides[] = {Side::Bottom, Side::Right, Side::Top, Side::Left};

inline const char* side_name(Side s) {
  switch (s) {
    case Side::Bottom: return "bottom";
    case Side::Right: return "right";
    case Side::Top: return "top";
    case Side::Left: return "left";
  }
  return "?";
}

inline Side parse_side(const std::string& s) {
  if (s == "bottom") return Side::Bottom;
  if (s == "right") return Side::Right;
  if (s == "top") return Side::Top;
  if (s == "left") return Side::Left;
  throw std::invalid_argument("unknown side: " + s);
}

struct Rectangle {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  Rectangle() = default;
  Rectangle(double ax0, double ay0, double ax1, double ay1) : x0(ax0), y0(ay0), x1(ax1), y1(ay1) {
    if (!(x0 < x1) || !(y0 < y1)) throw std::invalid_argument("rectangle must have x0 < x1 and y0 < y1");
  }

  static Rectangle unit_square() { return {0.0, 0.0, 1.0, 1.0}; }

  /// Rectangle anchored at the origin with the given area and width/height ratio.
  static Rectangle with_area(double area, double aspect = 1.0) {
    if (!(area > 0.0) || !(aspect > 0.0)) throw std::invalid_argument("area and aspect must be positive");
    return {0.0, 0.0, std::sqrt(area * aspect), std::sqrt(area / aspect)};
  }

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double perimeter() const { return 2.0 * (width() + height()); }
  double diameter() const { return std::hypot(width(), height()); }
  Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }

  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

  Rectangle padded(double margin) const { return {x0 - margin, y0 - margin, x1 + margin, y1 + margin}; }

  /// Corner at the counterclockwise end of side `s`.
  Vec2 end_corner(Side s) const {
    switch (s) {
      case Side::Bottom: return {x1, y0};
      case Side::Right: return {x1, y1};
      case Side::Top: return {x0, y1};
      case Side::Left: return {x0, y0};
    }
    return {};
  }

  /// Counterclockwise arclength of a boundary point lying on side `s`,
  /// measured from the bottom-left corner.
  double perimeter_param(Vec2 p, Side s) const {
    switch (s) {
      case Side::Bottom: return p.x - x0;
      case Side::Right: return width() + (p.y - y0);
      case Side::Top: return width() + height() + (x1 - p.x);
      case Side::Left: return 2.0 * width() + height() + (y1 - p.y);
    }
    return 0.0;
  }

  double distance_to_boundary(Vec2 p) const {
    return std::min(std::min(std::abs(p.x - x0), std::abs(p.x - x1)),
                    std::min(std::abs(p.y - y0), std::abs(p.y - y1)));
  }

  /// Largest distance from `p` to any point of the rectangle.
  double max_distance_from(Vec2 p) const {
    double dx = std::max(std::abs(p.x - x0), std::abs(p.x - x1));
    double dy = std::max(std::abs(p.y - y0), std::abs(p.y - y1));
    return std::hypot(dx, dy);
  }
};

}  // namespace vperc
