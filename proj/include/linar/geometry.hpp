#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace linar {

/// Planar position in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct FieldSize {
  double width = 1000.0;
  double height = 1000.0;

  bool contains(const Position& p) const { return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height; }
  double area() const { return width * height; }

  friend bool operator==(const FieldSize&, const FieldSize&) = default;
};

/// Movement cost between two positions: plain Euclidean distance.
inline double euclidean_cost(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Unit-disk link rule. Compared on squared distance so that every module
/// derives the same edge set from the same coordinates.
inline bool in_range(const Position& a, const Position& b, double range) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy <= range * range;
}

/// Shortest decimal with 9 significant digits, as written to topology files.
inline std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Rounds to the value that survives a 9-significant-digit text round trip.
inline double quantize_coord(double v) { return std::strtod(format_coord(v).c_str(), nullptr); }

}  // namespace linar
