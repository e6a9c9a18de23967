#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bhsim/scenario.hpp"

#include <filesystem>
#include <fstream>

using namespace bhsim;

namespace {

template <class E>
std::string key_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const E& e) {
        return e.key();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("minimal file gives the default scenario") {
    const Scenario s = parse_scenario("seed = 7\n");
    CHECK(s.seed == 7);
    CHECK(s.arena.outer_extent == Vec3(100, 40, 20));
    CHECK(s.arena.effective_extent == Vec3(90, 30, 5));
    CHECK(s.balloon_count == 5);
    CHECK(s.balloon.diameter == 0.45);
    CHECK(s.balloon.pole_height == 2.0);
    CHECK(s.fleet.agents == 1);
    CHECK(s.tick_rate == 20.0);
    CHECK(s.duration_limit == 600.0);
    CHECK(s.mission.altitude == 4.0);
    CHECK(s.vehicle.v_max == 2.0);
    CHECK(s.mission.search_speed == 2.0);
    CHECK(s.tracker.gate_px == 80.0);
    CHECK(s.fleet.claim_radius == 5.0);
    CHECK(s.fleet.reassign_mode == ReassignMode::Repartition);
}

TEST_CASE("comments, blank lines and overrides") {
    const Scenario s = parse_scenario(
        "# a comment\n"
        "\n"
        "seed = 3   # trailing\n"
        "tracker.gate_px = 60\n"
        "fleet.agents = 3\n"
        "fleet.failures = 1@120; 2@300\n"
        "fleet.reassign_mode = nearest_neighbor\n"
        "balloons.count = 2\n"
        "balloons.positions = 20 20; 70, 12\n"
        "camera.mount = down\n"
        "guidance.yaw_mode = pixel_bearing\n"
        "log.commands = false\n");
    CHECK(s.tracker.gate_px == 60.0);
    CHECK(s.fleet.agents == 3);
    REQUIRE(s.fleet.failures.size() == 2);
    CHECK(s.fleet.failures[1].agent_id == 2);
    CHECK(s.fleet.failures[1].time == 300.0);
    CHECK(s.fleet.reassign_mode == ReassignMode::NearestNeighbor);
    REQUIRE(s.balloon_positions.size() == 2);
    CHECK(s.balloon_positions[1] == Vec2(70, 12));
    CHECK(s.mount == CameraMount::Down);
    CHECK(s.mission.yaw_mode == YawMode::PixelBearing);
    CHECK_FALSE(s.log.commands);
    CHECK(s.log.detections);
    CHECK(s.agent_starts().size() == 3);
}

TEST_CASE("validation names the key") {
    CHECK(key_of<ValidationError>("tick_rate = 0") == "tick_rate");
    CHECK(key_of<ValidationError>("duration_limit = -1") == "duration_limit");
    CHECK(key_of<ValidationError>("vehicle.v_max = 0") == "vehicle.v_max");
    CHECK(key_of<ValidationError>("fleet.agents = 2\nfleet.starts = 10 10; 11 10") == "fleet.starts");
    CHECK(key_of<ValidationError>("fleet.starts = 1 1") == "fleet.starts");
    CHECK(key_of<ValidationError>("fleet.failures = 4@10") == "fleet.failures");
    CHECK(key_of<ValidationError>("noise.p_miss_base = 1.5") == "noise.p_miss_base");
    CHECK(key_of<ValidationError>("mission.altitude = 9") == "mission.altitude");
    CHECK(key_of<ValidationError>("balloons.positions = 0 0") == "balloons.positions");
}

TEST_CASE("parse errors name the key") {
    CHECK(key_of<ParseError>("ballons = 5") == "ballons");
    CHECK(key_of<ParseError>("seed = 1\nseed = 2") == "seed");
    CHECK(key_of<ParseError>("tick_rate = fast") == "tick_rate");
    CHECK(key_of<ParseError>("tracker.r_diag = 1 2 3") == "tracker.r_diag");
    CHECK(key_of<ParseError>("fleet.failures = 1-120") == "fleet.failures");
    CHECK(key_of<ParseError>("log.commands = maybe") == "log.commands");
    CHECK_THROWS_AS(parse_scenario("just words"), ParseError);
}

TEST_CASE("every documented key parses") {
    const auto keys = scenario_keys();
    CHECK(keys.size() > 40);
    CHECK(std::find(keys.begin(), keys.end(), "tracker.gate_px") != keys.end());
}

TEST_CASE("loading from disk") {
    const auto dir = std::filesystem::temp_directory_path() / "bhsim_test_scenario";
    std::filesystem::create_directories(dir);
    const auto file = dir / "s.txt";
    std::ofstream(file) << "seed = 11\nballoons.count = 3\n";
    const Scenario s = load_scenario(file);
    CHECK(s.seed == 11);
    CHECK(s.balloon_count == 3);
    CHECK_THROWS_AS(load_scenario(dir / "missing.txt"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("shipped scenario files load") {
    const std::filesystem::path root = BHSIM_SOURCE_DIR;
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(root / "scenarios")) {
        CAPTURE(e.path().string());
        CHECK_NOTHROW(load_scenario(e.path()));
        ++n;
    }
    CHECK(n > 0);
}
