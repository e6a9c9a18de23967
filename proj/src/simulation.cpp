#include "bhsim/simulation.hpp"

#include "bhsim/rng.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace bhsim {

namespace {

using nlohmann::json;

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Polygon& p) {
    json out = json::array();
    for (const auto& v : p.vertices) out.push_back(json::array({v.x(), v.y()}));
    return out;
}

json cells_json(const std::vector<PartitionCell>& cells) {
    json out = json::array();
    for (const auto& c : cells)
        out.push_back({{"agent", c.agent_id},
                       {"generator", json::array({c.generator.x(), c.generator.y()})},
                       {"polygon", to_json(c.polygon)}});
    return out;
}

SearchPath path_for(const std::vector<PartitionCell>& cells, int agent, const MissionParams& mp) {
    SearchPath path;
    path.spacing = mp.lane_spacing;
    path.altitude = mp.altitude;
    for (const auto& c : cells) {
        if (c.agent_id != agent || c.polygon.empty() || std::abs(area(c.polygon)) < 1.0) continue;
        SearchPath p = generate_search_path(c.polygon, mp.altitude, mp.lane_spacing);
        path.lanes.insert(path.lanes.end(), p.lanes.begin(), p.lanes.end());
    }
    return path;
}

std::vector<Polygon> polygons_of(const std::vector<PartitionCell>& cells, int agent) {
    std::vector<Polygon> out;
    for (const auto& c : cells)
        if (c.agent_id == agent) out.push_back(c.polygon);
    return out;
}

struct Agent {
    UavState uav;
    Tracker tracker;
    Mission mission;
    Rng rng;
    std::vector<Polygon> own_cells;
    std::map<int, int> track_truth;  // track id -> truth id of its last association (-1: clutter)
    double distance = 0.0;
    bool failed = false;
};

class Runner {
public:
    Runner(const Scenario& s, EventLog& log) : s_(s), log_(log) {}

    RunMetrics run() {
        try {
            init();
            loop();
        } catch (const InvariantViolation& e) {
            log_.append(world_.time, -1, EventKind::Diagnostic, {{"error", e.what()}});
            throw;
        }
        finish();
        return m_;
    }

private:
    void init() {
        const Scenario& s = s_;
        m_.seed = s.seed;

        if (!s.balloon_positions.empty()) {
            int id = 0;
            for (const auto& p : s.balloon_positions) {
                Balloon b;
                b.id = id++;
                b.anchor = Vec3{p.x(), p.y(), s.arena.effective_min().z() + s.balloon.pole_height};
                b.tether_length = s.balloon.tether_length;
                b.diameter = s.balloon.diameter;
                b.sway_amplitude = s.balloon.sway_amplitude;
                b.sway_frequency = s.balloon.sway_frequency;
                world_.balloons.push_back(b);
            }
        } else {
            Rng layout = split_stream(s.seed, "layout");
            world_.balloons = sample_balloon_layout(layout, s.arena, s.balloon_count, s.balloon_min_sep, s.balloon);
        }
        Rng sway = split_stream(s.seed, "sway");
        randomize_sway(sway, world_.balloons);
        advance_world(world_, 0.0);

        m_.balloons_initial = static_cast<int>(world_.balloons.size());
        m_.pop_times.assign(world_.balloons.size(), std::nullopt);

        fence_ = geofence_for(s.arena);
        mount_ = rotation_camera_to_body(s.mount);
        grid_ = CoverageGrid(s.footprint(), 1.0);
        cells_ = initial_partition(s);
        const auto starts = s.agent_starts();

        json balloons = json::array();
        for (const auto& b : world_.balloons)
            balloons.push_back({{"id", b.id}, {"anchor", to_json(b.anchor)}, {"diameter", b.diameter}});
        json starts_json = json::array();
        for (const auto& p : starts) starts_json.push_back(json::array({p.x(), p.y()}));
        log_.append(0.0, -1, EventKind::Header,
                    {{"schema", kEventSchema},
                     {"seed", s.seed},
                     {"tick_rate", s.tick_rate},
                     {"duration_limit", s.duration_limit},
                     {"balloons", balloons},
                     {"agents", starts_json}});
        log_.append(0.0, -1, EventKind::Partition, {{"reason", "initial"}, {"cells", cells_json(cells_)}});

        for (int i = 0; i < s.fleet.agents; ++i) {
            Agent a{UavState{}, Tracker(s.tracker), Mission(i, s.mission),
                    split_stream(s.seed, "perception/" + std::to_string(i)), polygons_of(cells_, i)};
            a.uav.id = i;
            a.uav.position = Vec3{starts[i].x(), starts[i].y(), s.mission.altitude};
            a.mission.assign_path(path_for(cells_, i, s.mission), starts[i]);
            if (!a.mission.path().empty()) {
                const Vec3 first = a.mission.path().lanes.front().start;
                const Vec2 d = (first - a.uav.position).head<2>();
                if (d.norm() > 1e-9) a.uav.yaw = std::atan2(d.y(), d.x());
            }
            agents_.push_back(std::move(a));
        }
        failure_applied_.assign(s.fleet.failures.size(), false);
    }

    void loop() {
        const double dt = s_.dt();
        const auto max_ticks = static_cast<std::int64_t>(std::llround(s_.duration_limit * s_.tick_rate));
        for (std::int64_t k = 1; k <= max_ticks; ++k) {
            if (world_.alive_count() == 0) break;
            if (std::none_of(agents_.begin(), agents_.end(), [](const Agent& a) { return !a.failed; })) break;
            const double t = static_cast<double>(k) * dt;

            advance_world(world_, t);
            fleet_step(t);

            std::vector<UavState> states;
            for (const auto& a : agents_) states.push_back(a.uav);
            const auto holds = deconflict(states, s_.fleet.min_sep + s_.fleet.deconflict_buffer);

            for (std::size_t i = 0; i < agents_.size(); ++i)
                if (!agents_[i].failed) agent_step(agents_[i], holds[i], states, k, t, dt);

            pop_checks(t);
            bookkeeping();
        }
    }

    void fleet_step(double t) {
        for (std::size_t f = 0; f < s_.fleet.failures.size(); ++f) {
            const AgentFailure& fail = s_.fleet.failures[f];
            if (failure_applied_[f] || fail.time > t) continue;
            failure_applied_[f] = true;
            Agent& a = agents_.at(fail.agent_id);
            if (a.failed) continue;

            a.failed = true;
            a.uav.alive = false;
            std::vector<MissionEvent> events;
            a.mission.fail(claims_, events);
            log_mission_events(a, events, t);
            log_.append(t, a.uav.id, EventKind::Failure, {{"position", to_json(a.uav.position)}});

            try {
                cells_ = reassign_on_failure(s_.footprint(), cells_, a.uav.id, s_.fleet.reassign_mode);
            } catch (const NoSurvivors&) {
                cells_.clear();
            }
            log_.append(t, -1, EventKind::Partition,
                        {{"reason", fmt::format("failure of agent {}", a.uav.id)},
                         {"mode", to_string(s_.fleet.reassign_mode)},
                         {"cells", cells_json(cells_)}});
            for (auto& other : agents_) {
                if (other.failed) continue;
                other.own_cells = polygons_of(cells_, other.uav.id);
                SearchPath p = trim_to_unvisited(path_for(cells_, other.uav.id, s_.mission), grid_);
                other.mission.assign_path(std::move(p), other.uav.position.head<2>());
            }
        }
    }

    void agent_step(Agent& a, bool hold, const std::vector<UavState>& fleet, std::int64_t frame, double t,
                    double dt) {
        const CameraPose pose = CameraPose::of(a.uav, mount_);
        const auto dets = generate_detections(s_.camera, pose, world_, s_.noise, a.rng, frame);
        std::vector<BoxMeasurement> boxes;
        boxes.reserve(dets.size());
        for (const auto& d : dets) boxes.push_back(d.box);

        if (s_.log.detections && !dets.empty()) {
            json arr = json::array();
            for (const auto& d : dets)
                arr.push_back(json::array({d.box.center.x(), d.box.center.y(), d.box.w, d.box.h,
                                           d.box.confidence, d.truth_id.value_or(-1)}));
            log_.append(t, a.uav.id, EventKind::Detection, {{"frame", frame}, {"boxes", arr}});
        }

        const TrackerStep ts = a.tracker.step(boxes);
        for (const auto& [track_id, bi] : ts.associations) a.track_truth[track_id] = dets[bi].truth_id.value_or(-1);
        for (const auto& e : ts.events) {
            log_.append(t, a.uav.id, EventKind::Track, {{"event", to_string(e.kind)}, {"track", e.track_id}});
            if (e.kind == TrackEventKind::Death) a.track_truth.erase(e.track_id);
        }

        MissionInputs in;
        in.time = t;
        in.dt = dt;
        in.uav = &a.uav;
        in.tracker = &a.tracker;
        in.camera = &s_.camera;
        in.mount = mount_;
        in.balloon_diameter = s_.balloon.diameter;
        in.own_cells = &a.own_cells;
        in.fence = fence_;
        in.fence_margin = s_.fleet.clamp_margin;
        in.v_max = s_.vehicle.v_max;
        const MissionOutput out = a.mission.step(in, claims_);
        log_mission_events(a, out.events, t);
        if (out.geofence_clamped)
            log_.append(t, a.uav.id, EventKind::Geofence, {{"position", to_json(a.uav.position)}});

        // Holds come from the start-of-tick snapshot. Proceeding agents also
        // drop any velocity component closing on a nearby neighbor; the lag
        // keeps a held agent drifting for about tau seconds.
        Vec3 velocity = Vec3::Zero();
        if (!hold) {
            const double radius = s_.fleet.min_sep + s_.fleet.deconflict_buffer;
            velocity = separation_filter(a.uav, fleet, radius, out.velocity);
            velocity = clamp_to_geofence(a.uav.position, velocity, fence_, s_.fleet.clamp_margin, s_.vehicle.v_max);
            if (closes_on_neighbor(a.uav, fleet, radius, velocity)) velocity = Vec3::Zero();
        }
        if (s_.log.commands) {
            json cmd = {{"phase", to_string(a.mission.phase())},
                        {"position", to_json(a.uav.position)},
                        {"velocity", to_json(velocity)},
                        {"yaw_rate", out.yaw_rate},
                        {"hold", hold}};
            if (out.guidance) {
                cmd["guidance"] = {{"V", out.guidance->V},
                                   {"v_camera", to_json(out.guidance->v_camera)},
                                   {"v_vehicle", to_json(out.guidance->v_vehicle)},
                                   {"yaw_rate", out.guidance->yaw_rate_cmd}};
            }
            if (out.target_track) cmd["target"] = *out.target_track;
            log_.append(t, a.uav.id, EventKind::Command, std::move(cmd));
        }

        const Vec3 before = a.uav.position;
        a.uav = step_uav(a.uav, velocity, out.yaw_rate, dt, s_.vehicle);
        a.distance += (a.uav.position - before).norm();

        if (!a.uav.position.allFinite() || !a.uav.velocity.allFinite() || !std::isfinite(a.uav.yaw))
            throw InvariantViolation(fmt::format("agent {} state is not finite", a.uav.id));
        const double speed = a.uav.velocity.norm();
        if (speed > s_.vehicle.v_max + 1e-9)
            throw InvariantViolation(fmt::format("agent {} speed {} exceeds v_max", a.uav.id, speed));
        m_.max_speed = std::max(m_.max_speed, speed);

        if (a.mission.phase() == Phase::Search) grid_.mark(a.uav.position.head<2>(), 0.5 * s_.mission.lane_spacing);
    }

    void log_mission_events(const Agent& a, const std::vector<MissionEvent>& events, double t) {
        for (const auto& e : events) {
            switch (e.kind) {
                case MissionEventKind::PhaseChange:
                    log_.append(t, a.uav.id, EventKind::Phase,
                                {{"from", to_string(e.from)}, {"to", to_string(e.to)}, {"reason", e.reason},
                                 {"track", e.track_id}, {"claim", e.claim_id}});
                    break;
                case MissionEventKind::ClaimGranted:
                case MissionEventKind::ClaimDenied:
                case MissionEventKind::ClaimReleased: {
                    json d = {{"event", to_string(e.kind)}, {"claim", e.claim_id}, {"estimate", to_json(e.point)}};
                    if (e.kind != MissionEventKind::ClaimReleased) {
                        d["track"] = e.track_id;
                        auto it = a.track_truth.find(e.track_id);
                        d["truth"] = it == a.track_truth.end() ? -1 : it->second;
                    } else {
                        d["reason"] = e.reason;
                    }
                    log_.append(t, a.uav.id, EventKind::Claim, std::move(d));
                    break;
                }
                case MissionEventKind::ConfirmPopped: {
                    const bool ok = audit_confirm(e.point);
                    ++m_.confirms;
                    if (!ok) ++m_.false_confirms;
                    log_.append(t, a.uav.id, EventKind::Confirm,
                                {{"estimate", to_json(e.point)}, {"claim", e.claim_id}, {"truth_ok", ok}});
                    break;
                }
                case MissionEventKind::Abandoned:
                    log_.append(t, a.uav.id, EventKind::Confirm,
                                {{"estimate", to_json(e.point)}, {"abandoned", true}, {"reason", e.reason}});
                    break;
            }
        }
    }

    // A confirmed pop is true when a popped balloon lies within the claim
    // radius of the estimate and no live balloon does.
    bool audit_confirm(const Vec3& estimate) const {
        bool dead_near = false;
        for (const auto& b : world_.balloons) {
            const double d = (b.center - estimate).norm();
            if (d > s_.fleet.claim_radius) continue;
            if (b.alive) return false;
            dead_near = true;
        }
        return dead_near;
    }

    void pop_checks(double t) {
        for (const auto& a : agents_) {
            if (a.failed) continue;
            const Vec3 tip = a.uav.position +
                             s_.mission.tip_offset * Vec3{std::cos(a.uav.yaw), std::sin(a.uav.yaw), 0.0};
            std::optional<int> hit;
            for (const auto& b : world_.balloons)
                if (b.alive && check_pop(tip, b.center, b.radius(), s_.mission.tip_reach)) {
                    hit = b.id;
                    break;
                }
            if (!hit) continue;
            world_ = pop_balloon(world_, *hit);
            m_.pop_times[*hit] = t;
            ++m_.balloons_popped;
            m_.pops_total_time = t;
            log_.append(t, a.uav.id, EventKind::Pop, {{"balloon", *hit}, {"tip", to_json(tip)}});
        }
    }

    void bookkeeping() {
        std::set<int> targeted;
        bool target_conflict = false;
        for (std::size_t i = 0; i < agents_.size(); ++i) {
            const Agent& a = agents_[i];
            if (a.failed) continue;
            if (!fence_.contains(a.uav.position)) ++m_.geofence_violations;
            for (std::size_t j = i + 1; j < agents_.size(); ++j)
                if (!agents_[j].failed)
                    m_.min_inter_agent_distance =
                        std::min(m_.min_inter_agent_distance, (a.uav.position - agents_[j].uav.position).norm());
            const Phase p = a.mission.phase();
            if ((p == Phase::Align || p == Phase::Approach) && a.mission.target_track()) {
                auto it = a.track_truth.find(*a.mission.target_track());
                if (it != a.track_truth.end() && it->second >= 0 && !targeted.insert(it->second).second)
                    target_conflict = true;
            }
        }
        if (target_conflict) ++m_.target_conflict_ticks;
        if (claims_.conflicting_pairs() > 0) ++m_.claim_conflict_ticks;
    }

    void finish() {
        m_.end_time = world_.time;
        for (const auto& a : agents_) m_.distance_flown.push_back(a.distance);
        log_.append(world_.time, -1, EventKind::End,
                    {{"popped", m_.balloons_popped},
                     {"balloons", m_.balloons_initial},
                     {"confirms", m_.confirms},
                     {"false_confirms", m_.false_confirms},
                     {"geofence_violations", m_.geofence_violations}});
        m_.event_count = log_.count();
        m_.event_digest = log_.digest();
    }

    const Scenario& s_;
    EventLog& log_;
    WorldState world_;
    std::vector<Agent> agents_;
    std::vector<PartitionCell> cells_;
    ClaimTable claims_;
    CoverageGrid grid_;
    Geofence fence_;
    Mat3 mount_ = Mat3::Identity();
    std::vector<bool> failure_applied_;
    RunMetrics m_;
};

std::string fmt_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{}", x);
}

}  // namespace

std::vector<PartitionCell> initial_partition(const Scenario& s) {
    return voronoi_partition(s.footprint(), s.agent_starts());
}

std::vector<SearchPath> initial_paths(const Scenario& s) {
    const auto cells = initial_partition(s);
    const auto starts = s.agent_starts();
    std::vector<SearchPath> out;
    for (int i = 0; i < s.fleet.agents; ++i) out.push_back(orient_path(path_for(cells, i, s.mission), starts[i]));
    return out;
}

RunMetrics run_simulation(const Scenario& s, EventLog& log) {
    s.validate();
    return Runner(s, log).run();
}

RunMetrics run_simulation(const Scenario& s) {
    EventLog log;
    return run_simulation(s, log);
}

SweepAggregate aggregate(const std::vector<RunMetrics>& rows) {
    SweepAggregate a;
    a.runs = static_cast<int>(rows.size());
    int ok = 0, success = 0;
    bool first = true;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            ++a.failed_runs;
            continue;
        }
        ++ok;
        if (r.all_popped()) ++success;
        a.popped_mean += r.balloons_popped;
        a.end_time_mean += r.end_time;
        if (first) {
            a.popped_min = a.popped_max = r.balloons_popped;
            a.end_time_min = a.end_time_max = r.end_time;
            first = false;
        }
        a.popped_min = std::min(a.popped_min, r.balloons_popped);
        a.popped_max = std::max(a.popped_max, r.balloons_popped);
        a.end_time_min = std::min(a.end_time_min, r.end_time);
        a.end_time_max = std::max(a.end_time_max, r.end_time);
    }
    if (ok > 0) {
        a.popped_mean /= ok;
        a.end_time_mean /= ok;
    }
    a.success_rate = a.runs > 0 ? static_cast<double>(success) / a.runs : 0.0;
    return a;
}

SweepResult sweep(const Scenario& s, const std::vector<std::uint64_t>& seeds, int jobs,
                  const std::optional<std::filesystem::path>& out_dir) {
    if (seeds.empty()) throw PreconditionError("sweep needs at least one seed");
    std::vector<RunMetrics> rows(seeds.size());
    std::atomic<std::size_t> next{0};
    if (out_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*out_dir, ec);
        if (ec) throw IoError("cannot create " + out_dir->string() + ": " + ec.message());
    }

    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            Scenario run = s;
            run.seed = seeds[i];
            try {
                if (out_dir) {
                    const auto path = *out_dir / fmt::format("events_{}.jsonl", seeds[i]);
                    std::ofstream f(path, std::ios::binary);
                    if (!f) throw IoError("cannot write " + path.string());
                    EventLog log(&f);
                    rows[i] = run_simulation(run, log);
                } else {
                    rows[i] = run_simulation(run);
                }
            } catch (const std::exception& e) {
                rows[i] = RunMetrics{};
                rows[i].seed = seeds[i];
                rows[i].error = e.what();
            }
        }
    };

    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(seeds.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < n; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::stable_sort(rows.begin(), rows.end(), [](const RunMetrics& a, const RunMetrics& b) { return a.seed < b.seed; });
    SweepResult out{std::move(rows), {}};
    out.aggregate = aggregate(out.rows);
    return out;
}

std::string metrics_csv_header() {
    return "seed,balloons,popped,all_popped,end_time,pops_total_time,confirms,false_confirms,"
           "geofence_violations,min_inter_agent_distance,claim_conflict_ticks,target_conflict_ticks,"
           "max_speed,distance_flown,pop_times,event_count,event_digest,error";
}

std::string metrics_csv_row(const RunMetrics& m) {
    std::vector<std::string> flown, pops;
    for (double d : m.distance_flown) flown.push_back(fmt_double(d));
    for (const auto& p : m.pop_times) pops.push_back(p ? fmt_double(*p) : "");
    std::string error = m.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:016x},{}", m.seed, m.balloons_initial,
                       m.balloons_popped, m.all_popped() ? 1 : 0, fmt_double(m.end_time),
                       fmt_double(m.pops_total_time), m.confirms, m.false_confirms, m.geofence_violations,
                       fmt_double(m.min_inter_agent_distance), m.claim_conflict_ticks, m.target_conflict_ticks,
                       fmt_double(m.max_speed), fmt::join(flown, ";"), fmt::join(pops, ";"), m.event_count,
                       m.event_digest, error);
}

std::string aggregate_csv(const SweepAggregate& a) {
    return fmt::format(
        "runs,failed_runs,success_rate,popped_mean,popped_min,popped_max,end_time_mean,end_time_min,end_time_max\n"
        "{},{},{},{},{},{},{},{},{}\n",
        a.runs, a.failed_runs, fmt_double(a.success_rate), fmt_double(a.popped_mean), a.popped_min, a.popped_max,
        fmt_double(a.end_time_mean), fmt_double(a.end_time_min), fmt_double(a.end_time_max));
}

}  // namespace bhsim
