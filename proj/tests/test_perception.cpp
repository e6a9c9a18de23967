#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bhsim/perception.hpp"

#include <cmath>

using namespace bhsim;

namespace {

// UAV at the origin, yaw 0, forward camera: camera z is world north, camera x
// is east and camera y points down.
CameraPose origin_pose() { return CameraPose{}; }

Vec3 world_from_camera(const Vec3& c) { return {c.z(), c.x(), -c.y()}; }

WorldState world_with(std::vector<Vec3> centers) {
    WorldState w;
    int id = 0;
    for (const auto& c : centers) {
        Balloon b;
        b.id = id++;
        b.center = c;
        w.balloons.push_back(b);
    }
    return w;
}

}  // namespace

TEST_CASE("pose round trip") {
    CameraPose pose;
    pose.position = {10, 20, 4};
    pose.yaw = 0.7;
    const Vec3 p{13, 18, 2.5};
    CHECK((pose.camera_to_world(pose.world_to_camera(p)) - p).norm() < 1e-12);
    CHECK((origin_pose().world_to_camera(world_from_camera(Vec3(1, 2, 3))) - Vec3(1, 2, 3)).norm() < 1e-15);
}

TEST_CASE("project_point") {
    const CameraIntrinsics cam;
    SUBCASE("optic axis") {
        const auto p = project_point(cam, origin_pose(), Vec3(5, 0, 0));
        REQUIRE(p);
        CHECK(p->pixel.norm() < 1e-12);
        CHECK(p->depth == doctest::Approx(5.0));
    }
    SUBCASE("behind the camera") { CHECK_FALSE(project_point(cam, origin_pose(), Vec3(-5, 0, 0))); }
    SUBCASE("on the image plane") { CHECK_FALSE(project_point(cam, origin_pose(), Vec3(0, 1, 0))); }
    SUBCASE("pinhole evaluation") {
        const auto p = project_point(cam, origin_pose(), world_from_camera(Vec3(1, 0, 6)));
        REQUIRE(p);
        CHECK(p->pixel.x() == doctest::Approx(100.0).epsilon(1e-12));
        CHECK(std::abs(p->pixel.y()) < 1e-12);
    }
    SUBCASE("outside the image") { CHECK_FALSE(project_point(cam, origin_pose(), world_from_camera(Vec3(10, 0, 1)))); }
    SUBCASE("yawed camera") {
        CameraPose pose;
        pose.yaw = kPi / 2;  // facing east
        const auto p = project_point(cam, pose, Vec3(0, 7, 0));
        REQUIRE(p);
        CHECK(p->pixel.norm() < 1e-9);
        CHECK(p->depth == doctest::Approx(7.0));
    }
}

TEST_CASE("generate_detections: empty frustum") {
    Rng rng(1);
    NoiseModel n = NoiseModel::zero();
    const auto w = world_with({Vec3(-5, 0, 0), Vec3(-10, 3, 1)});
    CHECK(generate_detections(CameraIntrinsics{}, origin_pose(), w, n, rng).empty());
}

TEST_CASE("generate_detections: on-axis balloon, zero noise") {
    Rng rng(1);
    const auto w = world_with({Vec3(5, 0, 0)});
    const auto d = generate_detections(CameraIntrinsics{}, origin_pose(), w, NoiseModel::zero(), rng, 17);
    REQUIRE(d.size() == 1);
    CHECK(d[0].box.center.norm() < 1e-12);
    CHECK(d[0].box.w == doctest::Approx(54.0));
    CHECK(d[0].box.h == doctest::Approx(54.0));
    CHECK(d[0].box.frame_index == 17);
    REQUIRE(d[0].truth_id);
    CHECK(*d[0].truth_id == 0);
    CHECK(d[0].box.confidence == doctest::Approx(0.9));
}

TEST_CASE("generate_detections: forced misses") {
    Rng rng(1);
    NoiseModel n = NoiseModel::zero();
    n.p_miss_base = 1.0;
    const auto w = world_with({Vec3(5, 0, 0), Vec3(8, 1, 0.5)});
    for (int i = 0; i < 100; ++i) CHECK(generate_detections(CameraIntrinsics{}, origin_pose(), w, n, rng).empty());
}

TEST_CASE("generate_detections: zero noise is deterministic and exact") {
    const CameraIntrinsics cam;
    CameraPose pose;
    pose.position = {1, 2, 3};
    pose.yaw = 0.2;
    const auto w = world_with({Vec3(9, 4, 3.2), Vec3(15, 1, 2.0), Vec3(30, 9, 3.5)});
    Rng a(4), b(99);
    const auto da = generate_detections(cam, pose, w, NoiseModel::zero(), a);
    const auto db = generate_detections(cam, pose, w, NoiseModel::zero(), b);
    REQUIRE(da.size() == 3);
    REQUIRE(db.size() == 3);
    for (std::size_t i = 0; i < da.size(); ++i) {
        const Vec3 c = pose.world_to_camera(w.balloons[i].center);
        const Vec2 exact{cam.focal_px * c.x() / c.z(), cam.focal_px * c.y() / c.z()};
        CHECK((da[i].box.center - exact).norm() < 1e-9);
        CHECK(da[i].box.center == db[i].box.center);
        CHECK(da[i].box.w == db[i].box.w);
        // generation and inversion share the small-angle model
        CHECK(estimate_range(fit_circle(da[i]), cam, 0.45) == doctest::Approx(c.z()).epsilon(1e-12));
    }
}

TEST_CASE("generate_detections: noise statistics") {
    const CameraIntrinsics cam;
    NoiseModel n = NoiseModel::zero();
    n.center_sigma = 2.0;
    n.size_sigma_frac = 0.05;
    n.p_miss_base = 0.2;
    const auto w = world_with({Vec3(10, 0, 0)});
    Rng rng(8);
    int hits = 0;
    double sum = 0, sum2 = 0, wsum = 0;
    const int frames = 20000;
    for (int f = 0; f < frames; ++f) {
        const auto d = generate_detections(cam, origin_pose(), w, n, rng, f);
        if (d.empty()) continue;
        ++hits;
        sum += d[0].box.center.x();
        sum2 += d[0].box.center.x() * d[0].box.center.x();
        wsum += d[0].box.w;
    }
    const double rate = double(hits) / frames;
    CHECK(rate == doctest::Approx(0.8).epsilon(0.02));
    const double mean = sum / hits;
    CHECK(std::abs(mean) < 0.1);
    CHECK(std::sqrt(sum2 / hits - mean * mean) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(wsum / hits == doctest::Approx(27.0).epsilon(0.01));
}

TEST_CASE("generate_detections: false alarms carry no truth") {
    const CameraIntrinsics cam;
    NoiseModel n = NoiseModel::zero();
    n.false_alarm_rate = 2.0;
    Rng rng(5);
    const WorldState empty;
    int total = 0;
    const int frames = 5000;
    for (int f = 0; f < frames; ++f)
        for (const auto& d : generate_detections(cam, origin_pose(), empty, n, rng, f)) {
            ++total;
            CHECK_FALSE(d.truth_id);
            CHECK(d.box.w > 0);
            CHECK(d.box.h > 0);
            CHECK(cam.in_image(d.box.center));
        }
    CHECK(double(total) / frames == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("detection centers stay within the padded image") {
    const CameraIntrinsics cam;
    NoiseModel n;
    n.center_sigma = 40.0;
    Rng rng(2);
    // balloon near the right edge
    const auto w = world_with({world_from_camera(Vec3(6.3, 0, 6))});
    for (int f = 0; f < 2000; ++f)
        for (const auto& d : generate_detections(cam, origin_pose(), w, n, rng, f)) {
            const Vec2 c = d.box.center + cam.principal_point;
            CHECK(c.x() >= -d.box.w / 2 - 1e-9);
            CHECK(c.x() <= cam.image_width + d.box.w / 2 + 1e-9);
            CHECK(c.y() >= -d.box.h / 2 - 1e-9);
            CHECK(c.y() <= cam.image_height + d.box.h / 2 + 1e-9);
        }
}

TEST_CASE("fit_circle") {
    BoxMeasurement b;
    b.center = {12.5, -3.25};
    b.w = b.h = 54;
    CHECK(fit_circle(b).radius == 27.0);
    CHECK(fit_circle(b).center == b.center);
    b.w = 60;
    b.h = 40;
    CHECK(fit_circle(b).radius == 30.0);
    b.w = 40;
    b.h = 60;
    CHECK(fit_circle(b).radius == 30.0);
}

TEST_CASE("estimate_range") {
    const CameraIntrinsics cam;
    CHECK(estimate_range({Vec2::Zero(), 27.0}, cam, 0.45) == doctest::Approx(5.0));
    CHECK(estimate_range({Vec2::Zero(), 2.7}, cam, 0.45) == doctest::Approx(50.0));
    CHECK(estimate_range({Vec2::Zero(), cam.focal_px / 2}, cam, 0.8) == doctest::Approx(0.8));
    CHECK_THROWS_AS(estimate_range({Vec2::Zero(), 0.4}, cam, 0.45), DegenerateCircle);
}

TEST_CASE("range against the exact sphere projection") {
    const CameraIntrinsics cam;
    const double D = 0.45, R = D / 2;
    for (double z = 2.0; z <= 40.0; z += 0.25) {
        // on axis the silhouette is a circle of radius f tan(asin(R / d))
        const double d = z;
        const double r_img = cam.focal_px * R / std::sqrt(d * d - R * R);
        const double est = estimate_range({Vec2::Zero(), r_img}, cam, D);
        CHECK(std::abs(est - z) / z < 0.02);
    }
}

TEST_CASE("order_by_depth") {
    CHECK(order_by_depth({{0, 7}, {1, 3}, {2, 5}}) == std::vector<int>{1, 2, 0});
    CHECK(order_by_depth({{9, 4.0}, {4, 4.0}}) == std::vector<int>{4, 9});
    CHECK(order_by_depth({}).empty());
}

TEST_CASE("pixel_to_world inverts projection") {
    const CameraIntrinsics cam;
    CameraPose pose;
    pose.position = {40, 12, 4};
    pose.yaw = -1.1;
    const Vec3 p{44, 8, 3};
    const auto proj = project_point(cam, pose, p);
    REQUIRE(proj);
    CHECK((pixel_to_world(cam, pose, proj->pixel, proj->depth) - p).norm() < 1e-9);
}

TEST_CASE("noise model validation") {
    CHECK_NOTHROW(NoiseModel{}.validate());
    NoiseModel n;
    n.p_miss_base = 1.5;
    CHECK_THROWS_AS(n.validate(), PreconditionError);
    n = NoiseModel{};
    n.center_sigma = -1;
    CHECK_THROWS_AS(n.validate(), PreconditionError);
    CameraIntrinsics c;
    c.principal_point = {2000, 0};
    CHECK_THROWS_AS(c.validate(), PreconditionError);
}
