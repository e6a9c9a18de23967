#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bhsim/world.hpp"

#include <cmath>

using namespace bhsim;

TEST_CASE("arena defaults and validation") {
    Arena a;
    CHECK(a.outer_extent == Vec3(100, 40, 20));
    CHECK(a.effective_extent == Vec3(90, 30, 5));
    CHECK(a.effective_min() == Vec3(5, 5, 0));
    CHECK(a.effective_max() == Vec3(95, 35, 5));
    CHECK_NOTHROW(a.validate());

    Arena bad = a;
    bad.effective_extent.x() = 120;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = a;
    bad.outer_extent.z() = 0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("empty layout") {
    Rng rng(1);
    CHECK(sample_balloon_layout(rng, Arena{}, 0, 8.0).empty());
}

TEST_CASE("layout is reproducible for a seed") {
    Rng a(42), b(42);
    const auto la = sample_balloon_layout(a, Arena{}, 5, 8.0);
    const auto lb = sample_balloon_layout(b, Arena{}, 5, 8.0);
    REQUIRE(la.size() == 5);
    for (std::size_t i = 0; i < la.size(); ++i) {
        CHECK(la[i].anchor == lb[i].anchor);  // bit-identical
        CHECK(la[i].id == static_cast<int>(i));
    }
}

TEST_CASE("layout respects min separation, brute-force pairs") {
    const Arena arena;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const auto l = sample_balloon_layout(rng, arena, 5, 8.0);
        REQUIRE(l.size() == 5);
        for (std::size_t i = 0; i < l.size(); ++i) {
            for (std::size_t j = i + 1; j < l.size(); ++j)
                CHECK((l[i].anchor - l[j].anchor).norm() >= 8.0);
            const Vec3& p = l[i].anchor;
            CHECK(p.x() >= 5.0);
            CHECK(p.x() <= 95.0);
            CHECK(p.y() >= 5.0);
            CHECK(p.y() <= 35.0);
            CHECK(p.z() == doctest::Approx(2.0));
        }
    }
}

TEST_CASE("infeasible packing gives up after the budget") {
    Rng rng(3);
    CHECK_THROWS_AS(sample_balloon_layout(rng, Arena{}, 50, 30.0, {}, 500), PackingInfeasible);
    CHECK_THROWS_AS(sample_balloon_layout(rng, Arena{}, -1, 1.0), PreconditionError);
}

TEST_CASE("sway: zero amplitude sits above the anchor") {
    Balloon b;
    b.anchor = {10, 10, 2};
    b.sway_amplitude = 0.0;
    for (double t : {0.0, 0.7, 13.1, 599.9}) {
        const Vec3 c = step_balloon_sway(b, t);
        CHECK(c.x() == doctest::Approx(10.0));
        CHECK(c.y() == doctest::Approx(10.0));
        CHECK(c.z() == doctest::Approx(3.0));
    }
}

TEST_CASE("sway: quarter period displacement is L sin(A)") {
    Balloon b;
    b.anchor = {0, 0, 2};
    b.tether_length = 1.0;
    b.sway_amplitude = 0.1;
    b.sway_frequency = 0.2;
    b.sway_phase = 0.0;
    b.sway_azimuth = 0.3;
    const Vec3 c = step_balloon_sway(b, 0.25 / b.sway_frequency);
    const double horizontal = std::hypot(c.x(), c.y());
    CHECK(horizontal == doctest::Approx(std::sin(0.1)).epsilon(1e-12));
    CHECK(std::atan2(c.y(), c.x()) == doctest::Approx(0.3));
    CHECK(c.z() == doctest::Approx(2.0 + std::cos(0.1)));
}

TEST_CASE("sway is periodic") {
    Balloon b;
    b.sway_phase = 1.1;
    b.sway_azimuth = 2.0;
    for (double t : {0.0, 1.3, 7.77}) {
        const Vec3 a = step_balloon_sway(b, t);
        const Vec3 c = step_balloon_sway(b, t + 1.0 / b.sway_frequency);
        CHECK((a - c).norm() < 1e-12);
    }
}

TEST_CASE("sampled centers stay inside the effective volume for a full run") {
    const Arena arena;
    Rng rng(7);
    auto balloons = sample_balloon_layout(rng, arena, 5, 8.0);
    randomize_sway(rng, balloons);
    const Vec3 lo = arena.effective_min(), hi = arena.effective_max();
    for (const auto& b : balloons)
        for (double t = 0.0; t <= 600.0; t += 0.05) {
            const Vec3 c = step_balloon_sway(b, t);
            CHECK(((c.array() >= lo.array()).all() && (c.array() <= hi.array()).all()));
            CHECK(c.z() <= 5.0);
        }
}

TEST_CASE("pop_balloon") {
    WorldState w;
    for (int i = 0; i < 5; ++i) {
        Balloon b;
        b.id = i;
        w.balloons.push_back(b);
    }
    CHECK(w.alive_count() == 5);
    WorldState p = pop_balloon(w, 2);
    CHECK_FALSE(p.balloon(2).alive);
    CHECK(p.alive_count() == 4);
    CHECK(w.alive_count() == 5);  // input untouched

    WorldState again = pop_balloon(p, 2);
    CHECK(again.alive_count() == 4);
    CHECK_THROWS_AS(pop_balloon(w, 17), UnknownBalloon);
}

TEST_CASE("advance_world is monotone and leaves dead balloons alone") {
    WorldState w;
    Balloon b;
    b.anchor = {20, 20, 2};
    b.sway_azimuth = 1.0;
    w.balloons = {b, b};
    w.balloons[1].id = 1;
    advance_world(w, 1.0);
    w = pop_balloon(w, 1);
    const Vec3 frozen = w.balloons[1].center;
    int alive_prev = w.alive_count();
    for (double t = 1.05; t < 5.0; t += 0.05) {
        const double before = w.time;
        advance_world(w, t);
        CHECK(w.time >= before);
        CHECK(w.balloons[1].center == frozen);
        CHECK(w.alive_count() <= alive_prev);
        alive_prev = w.alive_count();
    }
}
