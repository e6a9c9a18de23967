#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bhsim/geometry.hpp"

#include <random>

using namespace bhsim;

TEST_CASE("rectangle polygon") {
    const Rect r{{5, 5}, {95, 35}};
    const Polygon p = to_polygon(r);
    REQUIRE(p.vertices.size() == 4);
    CHECK(area(p) == doctest::Approx(2700.0));
    const Rect bb = bounding_box(p);
    CHECK(bb.min == r.min);
    CHECK(bb.max == r.max);
}

TEST_CASE("half-plane clipping") {
    const Polygon sq = to_polygon(Rect{{0, 0}, {10, 10}});
    CHECK(area(clip_halfplane(sq, {1, 0}, 4.0)) == doctest::Approx(40.0));
    CHECK(area(clip_halfplane(sq, {-1, 0}, -4.0)) == doctest::Approx(60.0));
    // diagonal cut keeps a triangle
    const Polygon tri = clip_halfplane(sq, Vec2(1, 1).normalized(), 10.0 / std::sqrt(2.0));
    CHECK(area(tri) == doctest::Approx(50.0));
    CHECK(clip_halfplane(sq, {1, 0}, -1.0).empty());
    CHECK(area(clip_halfplane(sq, {1, 0}, 20.0)) == doctest::Approx(100.0));
}

TEST_CASE("containment and distance") {
    const Polygon sq = to_polygon(Rect{{0, 0}, {10, 10}});
    CHECK(contains(sq, {5, 5}));
    CHECK(contains(sq, {0, 0}));
    CHECK(contains(sq, {10, 3}));
    CHECK_FALSE(contains(sq, {10.1, 3}));
    CHECK(distance_to(sq, {5, 5}) == 0.0);
    CHECK(distance_to(sq, {13, 5}) == doctest::Approx(3.0));
    CHECK(distance_to(sq, {13, 14}) == doctest::Approx(5.0));
}

TEST_CASE("scanline") {
    const Polygon sq = to_polygon(Rect{{0, 0}, {10, 4}});
    auto s = scanline(sq, 0, 2.0);
    REQUIRE(s);
    CHECK(s->first == doctest::Approx(0.0));
    CHECK(s->second == doctest::Approx(10.0));
    s = scanline(sq, 1, 7.0);
    REQUIRE(s);
    CHECK(s->first == doctest::Approx(0.0));
    CHECK(s->second == doctest::Approx(4.0));
    CHECK_FALSE(scanline(sq, 0, 5.0));
}

TEST_CASE("clipped area matches sampling") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Polygon sq = to_polygon(Rect{{0, 0}, {10, 10}});
    for (int k = 0; k < 50; ++k) {
        const double a = 2 * kPi * u(rng);
        const Vec2 n{std::cos(a), std::sin(a)};
        const double off = n.dot(Vec2{10 * u(rng), 10 * u(rng)});
        const Polygon c = clip_halfplane(sq, n, off);
        int in = 0;
        const int N = 20000;
        for (int i = 0; i < N; ++i) {
            const Vec2 p{10 * u(rng), 10 * u(rng)};
            in += n.dot(p) <= off;
        }
        CHECK(std::abs(area(c) - 100.0 * in / N) < 2.0);
    }
}
