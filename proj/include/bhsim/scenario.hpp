#pragma once

#include "bhsim/fleet.hpp"
#include "bhsim/mission.hpp"
#include "bhsim/perception.hpp"
#include "bhsim/tracking.hpp"
#include "bhsim/vehicle.hpp"
#include "bhsim/world.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bhsim {

// Scenario-file errors carry the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string kind, std::string key, const std::string& what)
        : Error(std::move(kind), key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class ParseError : public ConfigError {
public:
    ParseError(std::string key, const std::string& what) : ConfigError("ParseError", std::move(key), what) {}
};

class ValidationError : public ConfigError {
public:
    ValidationError(std::string key, const std::string& what)
        : ConfigError("ValidationError", std::move(key), what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("IoError", what) {}
};

struct AgentFailure {
    int agent_id = 0;
    double time = 0.0;
};

struct FleetParams {
    int agents = 1;
    std::vector<Vec2> starts;  // empty: spread along the footprint's long axis
    double claim_radius = 5.0;
    double min_sep = 3.0;
    double deconflict_buffer = 2.0;
    ReassignMode reassign_mode = ReassignMode::Repartition;
    std::vector<AgentFailure> failures;
    double clamp_margin = 1.0;
};

struct LogParams {
    bool detections = true;
    bool commands = true;
};

struct Scenario {
    std::uint64_t seed = 0;
    double tick_rate = 20.0;
    double duration_limit = 600.0;

    Arena arena;
    int balloon_count = 5;
    double balloon_min_sep = 8.0;
    std::vector<Vec2> balloon_positions;  // explicit anchors; overrides sampling
    BalloonTemplate balloon;

    CameraIntrinsics camera;
    CameraMount mount = CameraMount::Forward;
    NoiseModel noise;
    TrackParams tracker;
    VehicleParams vehicle;
    MissionParams mission;
    FleetParams fleet;
    LogParams log;

    double dt() const { return 1.0 / tick_rate; }
    Rect footprint() const;
    /// Agent start positions (xy), explicit or the default spread.
    std::vector<Vec2> agent_starts() const;

    /// Throws ValidationError naming the first key that breaks an invariant.
    void validate() const;
};

/// Parses `key = value` lines ('#' comments) on top of the defaults, then
/// validates. Unknown or repeated keys and malformed values raise ParseError.
Scenario parse_scenario(const std::string& text);

/// Reads and parses a scenario file. Throws IoError if it cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// Every recognised key, in documentation order.
std::vector<std::string> scenario_keys();

}  // namespace bhsim
