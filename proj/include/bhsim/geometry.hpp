#pragma once

#include "bhsim/core.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace bhsim {

struct Rect {
    Vec2 min = Vec2::Zero();
    Vec2 max = Vec2::Zero();

    double area() const { return (max - min).prod(); }
    bool contains(const Vec2& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
};

// Convex polygon, counter-clockwise vertices.
struct Polygon {
    std::vector<Vec2> vertices;

    bool empty() const { return vertices.size() < 3; }
};

Polygon to_polygon(const Rect& r);

double area(const Polygon& poly);

Rect bounding_box(const Polygon& poly);

/// Keeps the part of `poly` with normal . p <= offset.
Polygon clip_halfplane(const Polygon& poly, const Vec2& normal, double offset);

/// Boundary-inclusive point test for a convex polygon, with tolerance `eps`.
bool contains(const Polygon& poly, const Vec2& p, double eps = 1e-9);

/// Euclidean distance from `p` to the polygon (0 inside).
double distance_to(const Polygon& poly, const Vec2& p);

/// Interval covered by the convex polygon on the line where coordinate
/// `axis` is free and the other coordinate equals `offset`.
std::optional<std::pair<double, double>> scanline(const Polygon& poly, int axis, double offset);

}  // namespace bhsim
