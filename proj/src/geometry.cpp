#include "bhsim/geometry.hpp"

#include <algorithm>
#include <limits>

namespace bhsim {

Polygon to_polygon(const Rect& r) {
    return Polygon{{r.min, Vec2{r.max.x(), r.min.y()}, r.max, Vec2{r.min.x(), r.max.y()}}};
}

double area(const Polygon& poly) {
    const auto& v = poly.vertices;
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * twice;
}

Rect bounding_box(const Polygon& poly) {
    Rect r{Vec2::Constant(std::numeric_limits<double>::infinity()),
           Vec2::Constant(-std::numeric_limits<double>::infinity())};
    for (const auto& p : poly.vertices) {
        r.min = r.min.cwiseMin(p);
        r.max = r.max.cwiseMax(p);
    }
    return r;
}

Polygon clip_halfplane(const Polygon& poly, const Vec2& normal, double offset) {
    Polygon out;
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        const double da = normal.dot(a) - offset;
        const double db = normal.dot(b) - offset;
        if (da <= 0.0) out.vertices.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            const double s = da / (da - db);
            out.vertices.push_back(a + s * (b - a));
        }
    }
    // drop near-duplicate vertices produced by clipping through a vertex
    std::vector<Vec2> clean;
    for (const auto& p : out.vertices)
        if (clean.empty() || (p - clean.back()).norm() > 1e-12) clean.push_back(p);
    while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-12) clean.pop_back();
    out.vertices = std::move(clean);
    return out;
}

bool contains(const Polygon& poly, const Vec2& p, double eps) {
    if (poly.empty()) return false;
    const auto& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 e = v[(i + 1) % v.size()] - v[i];
        const Vec2 d = p - v[i];
        const double len = e.norm();
        if (len == 0.0) continue;
        if ((e.x() * d.y() - e.y() * d.x()) / len < -eps) return false;
    }
    return true;
}

double distance_to(const Polygon& poly, const Vec2& p) {
    if (contains(poly, p)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const auto& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2 e = v[(i + 1) % v.size()] - a;
        const double len2 = e.squaredNorm();
        const double s = len2 > 0.0 ? std::clamp((p - a).dot(e) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (a + s * e - p).norm());
    }
    return best;
}

std::optional<std::pair<double, double>> scanline(const Polygon& poly, int axis, double offset) {
    const int other = 1 - axis;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const auto& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        const double da = a[other] - offset;
        const double db = b[other] - offset;
        if (da == 0.0) {
            lo = std::min(lo, a[axis]);
            hi = std::max(hi, a[axis]);
        }
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            const double x = a[axis] + da / (da - db) * (b[axis] - a[axis]);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    if (!(lo <= hi)) return std::nullopt;
    return std::make_pair(lo, hi);
}

}  // namespace bhsim
