#include "bhsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace bhsim {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_number(const std::string& key, const std::string& v) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x))
        throw ParseError(key, "expected a number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& v) {
    long long x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ParseError(key, "expected an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError(key, "expected true/false, got '" + v + "'");
}

// Numbers separated by spaces and/or commas.
std::vector<double> to_numbers(const std::string& key, const std::string& v) {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::vector<double> out;
    for (const auto& tok : split(s, ' ')) out.push_back(to_number(key, tok));
    return out;
}

template <int N>
Eigen::Matrix<double, N, 1> to_fixed(const std::string& key, const std::string& v) {
    const auto xs = to_numbers(key, v);
    if (xs.size() != N)
        throw ParseError(key, "expected " + std::to_string(N) + " numbers, got " + std::to_string(xs.size()));
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) out[i] = xs[i];
    return out;
}

// "x y; x y; ..." (empty allowed)
std::vector<Vec2> to_points(const std::string& key, const std::string& v) {
    std::vector<Vec2> out;
    for (const auto& item : split(v, ';')) out.push_back(to_fixed<2>(key, item));
    return out;
}

// "agent@time; ..."
std::vector<AgentFailure> to_failures(const std::string& key, const std::string& v) {
    std::vector<AgentFailure> out;
    for (const auto& item : split(v, ';')) {
        const auto at = item.find('@');
        if (at == std::string::npos) throw ParseError(key, "expected agent@time, got '" + item + "'");
        out.push_back(AgentFailure{static_cast<int>(to_integer(key, trim(item.substr(0, at)))),
                                   to_number(key, trim(item.substr(at + 1)))});
    }
    return out;
}

using Setter = std::function<void(Scenario&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, Setter>>& key_table() {
    static const std::vector<std::pair<std::string, Setter>> table = [] {
        std::vector<std::pair<std::string, Setter>> t;
        auto num = [&t](std::string k, auto field) {
            t.emplace_back(std::move(k), [field](Scenario& s, const std::string& key, const std::string& v) {
                field(s) = to_number(key, v);
            });
        };
        auto integer = [&t](std::string k, auto field) {
            t.emplace_back(std::move(k), [field](Scenario& s, const std::string& key, const std::string& v) {
                field(s) = static_cast<std::remove_reference_t<decltype(field(s))>>(to_integer(key, v));
            });
        };
        auto boolean = [&t](std::string k, auto field) {
            t.emplace_back(std::move(k), [field](Scenario& s, const std::string& key, const std::string& v) {
                field(s) = to_bool(key, v);
            });
        };
        auto custom = [&t](std::string k, Setter f) { t.emplace_back(std::move(k), std::move(f)); };

        custom("seed", [](Scenario& s, const std::string& key, const std::string& v) {
            const long long x = to_integer(key, v);
            if (x < 0) throw ParseError(key, "seed must be non-negative");
            s.seed = static_cast<std::uint64_t>(x);
        });
        num("tick_rate", [](Scenario& s) -> double& { return s.tick_rate; });
        num("duration_limit", [](Scenario& s) -> double& { return s.duration_limit; });

        custom("arena.outer_extent", [](Scenario& s, const std::string& k, const std::string& v) { s.arena.outer_extent = to_fixed<3>(k, v); });
        custom("arena.effective_extent", [](Scenario& s, const std::string& k, const std::string& v) { s.arena.effective_extent = to_fixed<3>(k, v); });
        custom("arena.origin", [](Scenario& s, const std::string& k, const std::string& v) { s.arena.origin = to_fixed<3>(k, v); });
        num("arena.geofence_margin", [](Scenario& s) -> double& { return s.arena.geofence_margin; });

        integer("balloons.count", [](Scenario& s) -> int& { return s.balloon_count; });
        num("balloons.min_sep", [](Scenario& s) -> double& { return s.balloon_min_sep; });
        custom("balloons.positions", [](Scenario& s, const std::string& k, const std::string& v) { s.balloon_positions = to_points(k, v); });
        num("balloons.pole_height", [](Scenario& s) -> double& { return s.balloon.pole_height; });
        num("balloons.tether_length", [](Scenario& s) -> double& { return s.balloon.tether_length; });
        num("balloons.diameter", [](Scenario& s) -> double& { return s.balloon.diameter; });
        num("balloons.sway_amplitude", [](Scenario& s) -> double& { return s.balloon.sway_amplitude; });
        num("balloons.sway_frequency", [](Scenario& s) -> double& { return s.balloon.sway_frequency; });

        num("camera.focal_px", [](Scenario& s) -> double& { return s.camera.focal_px; });
        integer("camera.width", [](Scenario& s) -> int& { return s.camera.image_width; });
        integer("camera.height", [](Scenario& s) -> int& { return s.camera.image_height; });
        custom("camera.principal_point", [](Scenario& s, const std::string& k, const std::string& v) { s.camera.principal_point = to_fixed<2>(k, v); });
        custom("camera.mount", [](Scenario& s, const std::string& k, const std::string& v) {
            try {
                s.mount = parse_mount(v);
            } catch (const UnknownMount& e) {
                throw ParseError(k, e.what());
            }
        });

        num("noise.center_sigma", [](Scenario& s) -> double& { return s.noise.center_sigma; });
        num("noise.size_sigma_frac", [](Scenario& s) -> double& { return s.noise.size_sigma_frac; });
        num("noise.p_miss_base", [](Scenario& s) -> double& { return s.noise.p_miss_base; });
        num("noise.p_miss_range_scale", [](Scenario& s) -> double& { return s.noise.p_miss_range_scale; });
        num("noise.false_alarm_rate", [](Scenario& s) -> double& { return s.noise.false_alarm_rate; });
        num("noise.confidence_floor", [](Scenario& s) -> double& { return s.noise.confidence_floor; });

        custom("tracker.q_diag", [](Scenario& s, const std::string& k, const std::string& v) { s.tracker.q_diag = to_fixed<6>(k, v); });
        custom("tracker.r_diag", [](Scenario& s, const std::string& k, const std::string& v) { s.tracker.r_diag = to_fixed<4>(k, v); });
        custom("tracker.p0_diag", [](Scenario& s, const std::string& k, const std::string& v) { s.tracker.p0_diag = to_fixed<6>(k, v); });
        num("tracker.gate_px", [](Scenario& s) -> double& { return s.tracker.gate_px; });
        integer("tracker.m_confirm", [](Scenario& s) -> int& { return s.tracker.m_confirm; });
        integer("tracker.k_delete", [](Scenario& s) -> int& { return s.tracker.k_delete; });

        num("vehicle.tau", [](Scenario& s) -> double& { return s.vehicle.tau; });
        num("vehicle.v_max", [](Scenario& s) -> double& { return s.vehicle.v_max; });
        num("vehicle.yaw_rate_max", [](Scenario& s) -> double& { return s.vehicle.yaw_rate_max; });

        num("guidance.approach_speed", [](Scenario& s) -> double& { return s.mission.approach_speed; });
        num("guidance.yaw_gain", [](Scenario& s) -> double& { return s.mission.yaw_gain; });
        custom("guidance.yaw_mode", [](Scenario& s, const std::string& k, const std::string& v) {
            if (v == "pixel_bearing") s.mission.yaw_mode = YawMode::PixelBearing;
            else if (v == "horizontal_offset") s.mission.yaw_mode = YawMode::HorizontalOffset;
            else throw ParseError(k, "expected pixel_bearing or horizontal_offset, got '" + v + "'");
        });

        num("mission.search_speed", [](Scenario& s) -> double& { return s.mission.search_speed; });
        num("mission.altitude", [](Scenario& s) -> double& { return s.mission.altitude; });
        num("mission.lane_spacing", [](Scenario& s) -> double& { return s.mission.lane_spacing; });
        integer("mission.m_commit", [](Scenario& s) -> int& { return s.mission.m_commit; });
        num("mission.align_tol_px", [](Scenario& s) -> double& { return s.mission.align_tol_px; });
        num("mission.standoff", [](Scenario& s) -> double& { return s.mission.standoff; });
        num("mission.t_confirm", [](Scenario& s) -> double& { return s.mission.t_confirm; });
        num("mission.tip_offset", [](Scenario& s) -> double& { return s.mission.tip_offset; });
        num("mission.tip_reach", [](Scenario& s) -> double& { return s.mission.tip_reach; });
        integer("mission.retry_limit", [](Scenario& s) -> int& { return s.mission.retry_limit; });
        num("mission.waypoint_tol", [](Scenario& s) -> double& { return s.mission.waypoint_tol; });
        num("mission.cell_tolerance", [](Scenario& s) -> double& { return s.mission.cell_tolerance; });
        integer("mission.max_sweeps", [](Scenario& s) -> int& { return s.mission.max_sweeps; });
        num("mission.align_timeout", [](Scenario& s) -> double& { return s.mission.align_timeout; });
        num("mission.revisit_timeout", [](Scenario& s) -> double& { return s.mission.revisit_timeout; });
        num("mission.contact_range", [](Scenario& s) -> double& { return s.mission.contact_range; });

        integer("fleet.agents", [](Scenario& s) -> int& { return s.fleet.agents; });
        custom("fleet.starts", [](Scenario& s, const std::string& k, const std::string& v) { s.fleet.starts = to_points(k, v); });
        num("fleet.claim_radius", [](Scenario& s) -> double& { return s.fleet.claim_radius; });
        num("fleet.min_sep", [](Scenario& s) -> double& { return s.fleet.min_sep; });
        num("fleet.deconflict_buffer", [](Scenario& s) -> double& { return s.fleet.deconflict_buffer; });
        custom("fleet.reassign_mode", [](Scenario& s, const std::string& k, const std::string& v) {
            try {
                s.fleet.reassign_mode = parse_reassign_mode(v);
            } catch (const PreconditionError& e) {
                throw ParseError(k, e.what());
            }
        });
        custom("fleet.failures", [](Scenario& s, const std::string& k, const std::string& v) { s.fleet.failures = to_failures(k, v); });
        num("fleet.clamp_margin", [](Scenario& s) -> double& { return s.fleet.clamp_margin; });

        boolean("log.detections", [](Scenario& s) -> bool& { return s.log.detections; });
        boolean("log.commands", [](Scenario& s) -> bool& { return s.log.commands; });
        return t;
    }();
    return table;
}

void require(bool ok, const char* key, const std::string& what) {
    if (!ok) throw ValidationError(key, what);
}

}  // namespace

Rect Scenario::footprint() const {
    return Rect{arena.effective_min().head<2>(), arena.effective_max().head<2>()};
}

std::vector<Vec2> Scenario::agent_starts() const {
    if (!fleet.starts.empty()) return fleet.starts;
    const Rect fp = footprint();
    const Vec2 dims = fp.max - fp.min;
    const int axis = dims.x() >= dims.y() ? 0 : 1;
    std::vector<Vec2> out;
    for (int i = 0; i < fleet.agents; ++i) {
        Vec2 p = 0.5 * (fp.min + fp.max);
        p[axis] = fp.min[axis] + (i + 0.5) * dims[axis] / fleet.agents;
        out.push_back(p);
    }
    return out;
}

void Scenario::validate() const {
    require(tick_rate > 0.0, "tick_rate", "must be > 0");
    require(duration_limit > 0.0, "duration_limit", "must be > 0");

    for (int i = 0; i < 3; ++i) {
        require(arena.outer_extent[i] > 0.0, "arena.outer_extent", "must be strictly positive");
        require(arena.effective_extent[i] > 0.0, "arena.effective_extent", "must be strictly positive");
        require(arena.effective_extent[i] <= arena.outer_extent[i], "arena.effective_extent",
                "must not exceed arena.outer_extent");
    }
    require(arena.geofence_margin >= 0.0, "arena.geofence_margin", "must be >= 0");

    require(balloon_count >= 0, "balloons.count", "must be >= 0");
    require(balloon_min_sep >= 0.0, "balloons.min_sep", "must be >= 0");
    require(balloon.diameter > 0.0, "balloons.diameter", "must be > 0");
    require(balloon.tether_length >= 0.0, "balloons.tether_length", "must be >= 0");
    require(balloon.pole_height >= 0.0, "balloons.pole_height", "must be >= 0");
    require(balloon.sway_amplitude >= 0.0 && balloon.sway_amplitude < kPi / 2, "balloons.sway_amplitude",
            "must lie in [0, pi/2)");
    require(balloon.sway_frequency >= 0.0, "balloons.sway_frequency", "must be >= 0");
    require(arena.effective_min().z() + balloon.pole_height + balloon.tether_length <= arena.effective_max().z(),
            "balloons.tether_length", "balloon center would exceed the effective height");
    const Rect fp = footprint();
    for (const auto& p : balloon_positions)
        require(fp.contains(p), "balloons.positions", "anchor outside the effective footprint");

    require(camera.focal_px > 0.0, "camera.focal_px", "must be > 0");
    require(camera.image_width > 0, "camera.width", "must be > 0");
    require(camera.image_height > 0, "camera.height", "must be > 0");
    require(camera.principal_point.x() >= 0.0 && camera.principal_point.x() <= camera.image_width &&
                camera.principal_point.y() >= 0.0 && camera.principal_point.y() <= camera.image_height,
            "camera.principal_point", "must lie inside the image");

    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    require(noise.center_sigma >= 0.0, "noise.center_sigma", "must be >= 0");
    require(noise.size_sigma_frac >= 0.0, "noise.size_sigma_frac", "must be >= 0");
    require(prob(noise.p_miss_base), "noise.p_miss_base", "must lie in [0, 1]");
    require(noise.p_miss_range_scale >= 0.0, "noise.p_miss_range_scale", "must be >= 0");
    require(noise.false_alarm_rate >= 0.0, "noise.false_alarm_rate", "must be >= 0");
    require(prob(noise.confidence_floor), "noise.confidence_floor", "must lie in [0, 1]");

    require((tracker.q_diag.array() > 0.0).all(), "tracker.q_diag", "entries must be > 0");
    require((tracker.r_diag.array() > 0.0).all(), "tracker.r_diag", "entries must be > 0");
    require((tracker.p0_diag.array() > 0.0).all(), "tracker.p0_diag", "entries must be > 0");
    require(tracker.gate_px > 0.0, "tracker.gate_px", "must be > 0");
    require(tracker.m_confirm >= 1, "tracker.m_confirm", "must be >= 1");
    require(tracker.k_delete >= 1, "tracker.k_delete", "must be >= 1");

    require(vehicle.tau > 0.0, "vehicle.tau", "must be > 0");
    require(vehicle.v_max > 0.0, "vehicle.v_max", "must be > 0");
    require(vehicle.yaw_rate_max > 0.0, "vehicle.yaw_rate_max", "must be > 0");

    require(mission.approach_speed > 0.0, "guidance.approach_speed", "must be > 0");
    require(mission.yaw_gain > 0.0, "guidance.yaw_gain", "must be > 0");
    require(mission.search_speed > 0.0, "mission.search_speed", "must be > 0");
    require(mission.altitude > arena.effective_min().z() && mission.altitude <= arena.effective_max().z(),
            "mission.altitude", "must lie inside the effective height");
    require(mission.lane_spacing > 0.0, "mission.lane_spacing", "must be > 0");
    require(mission.m_commit >= 1, "mission.m_commit", "must be >= 1");
    require(mission.align_tol_px > 0.0, "mission.align_tol_px", "must be > 0");
    require(mission.standoff > 0.0, "mission.standoff", "must be > 0");
    require(mission.t_confirm >= 0.0, "mission.t_confirm", "must be >= 0");
    require(mission.tip_offset >= 0.0, "mission.tip_offset", "must be >= 0");
    require(mission.tip_reach >= 0.0, "mission.tip_reach", "must be >= 0");
    require(mission.retry_limit >= 0, "mission.retry_limit", "must be >= 0");
    require(mission.waypoint_tol > 0.0, "mission.waypoint_tol", "must be > 0");
    require(mission.cell_tolerance >= 0.0, "mission.cell_tolerance", "must be >= 0");
    require(mission.max_sweeps >= 1, "mission.max_sweeps", "must be >= 1");
    require(mission.align_timeout > 0.0, "mission.align_timeout", "must be > 0");
    require(mission.revisit_timeout > 0.0, "mission.revisit_timeout", "must be > 0");
    require(mission.contact_range > 0.0, "mission.contact_range", "must be > 0");

    require(fleet.agents >= 1, "fleet.agents", "must be >= 1");
    require(fleet.starts.empty() || static_cast<int>(fleet.starts.size()) == fleet.agents, "fleet.starts",
            "needs one start per agent");
    const auto starts = agent_starts();
    for (std::size_t i = 0; i < starts.size(); ++i) {
        require(fp.contains(starts[i]), "fleet.starts", "start outside the geofenced footprint");
        for (std::size_t j = i + 1; j < starts.size(); ++j)
            require((starts[i] - starts[j]).norm() > fleet.min_sep, "fleet.starts",
                    "starts closer than fleet.min_sep");
    }
    require(fleet.claim_radius > 0.0, "fleet.claim_radius", "must be > 0");
    require(fleet.min_sep > 0.0, "fleet.min_sep", "must be > 0");
    require(fleet.deconflict_buffer >= 0.0, "fleet.deconflict_buffer", "must be >= 0");
    require(fleet.clamp_margin >= 0.0, "fleet.clamp_margin", "must be >= 0");
    for (const auto& f : fleet.failures) {
        require(f.agent_id >= 0 && f.agent_id < fleet.agents, "fleet.failures", "unknown agent id");
        require(f.time >= 0.0, "fleet.failures", "failure time must be >= 0");
    }
}

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    std::map<std::string, Setter> setters(key_table().begin(), key_table().end());
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end()) throw ParseError(key, "unknown key");
        if (!seen.insert(key).second) throw ParseError(key, "repeated key");
        it->second(s, key, value);
    }

    s.mission.claim_radius = s.fleet.claim_radius;
    s.mission.yaw_rate_limit = s.vehicle.yaw_rate_max;
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read scenario file '" + path.string() + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_scenario(buf.str());
}

std::vector<std::string> scenario_keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : key_table()) out.push_back(k);
    return out;
}

}  // namespace bhsim
