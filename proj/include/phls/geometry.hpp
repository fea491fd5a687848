// Small 2D vector/rectangle helpers shared by every module.

#pragma once

#include <algorithm>
#include <cmath>

namespace phls {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;

    double length() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).length(); }

// Axis-aligned rectangle [min, min+size] with a closed boundary.
struct Rect {
    Vec2 min;
    Vec2 size;

    Vec2 max() const { return min + size; }

    bool contains(Vec2 p) const {
        return p.x >= min.x && p.x <= min.x + size.x &&
               p.y >= min.y && p.y <= min.y + size.y;
    }

    Vec2 clamp(Vec2 p) const {
        return {std::clamp(p.x, min.x, min.x + size.x),
                std::clamp(p.y, min.y, min.y + size.y)};
    }
};

} // namespace phls
