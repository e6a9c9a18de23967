#pragma once

#include "bhsim/fleet.hpp"
#include "bhsim/geometry.hpp"
#include "bhsim/guidance.hpp"
#include "bhsim/perception.hpp"
#include "bhsim/tracking.hpp"
#include "bhsim/vehicle.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bhsim {

enum class Phase { Search, Align, Approach, Revisit, Confirm, Done };

std::string_view to_string(Phase p);

/// Edges of the mission graph. Any phase may also go to Done when the
/// agent fails, and Done returns to Search when new area is assigned.
bool is_legal_transition(Phase from, Phase to);

struct Lane {
    Vec3 start;
    Vec3 end;
};

struct SearchPath {
    std::vector<Lane> lanes;  // flown in order, start -> end
    double spacing = 10.0;
    double altitude = 4.0;

    std::vector<Vec3> waypoints() const;
    bool empty() const { return lanes.empty(); }
};

/// Boustrophedon lanes along the longer axis of the cell's bounding box.
/// Lanes sit at the centers of ceil(width / spacing) equal strips across the
/// shorter axis, so every footprint point of a rectangular cell is within
/// spacing / 2 of a lane. Throws DegenerateCell below 1 m^2.
SearchPath generate_search_path(const Polygon& cell, double altitude, double spacing);

/// Picks the traversal (as is, reversed, lanes flipped, or both) whose first
/// waypoint is nearest `start`.
SearchPath orient_path(const SearchPath& path, const Vec2& start);

/// Drops lane stretches whose swath (spacing / 2 either side) is entirely swept.
SearchPath trim_to_unvisited(const SearchPath& path, const CoverageGrid& grid, double sample_step = 1.0);

bool should_commit(const Track& track, int m_commit);

/// Closed test: |tip - center| <= radius + tip_reach.
bool check_pop(const Vec3& tip_position, const Vec3& balloon_center, double balloon_radius,
               double tip_reach);

/// Point `d_standoff` behind `last_estimate` along the approach heading,
/// altitude clamped to [1, 5] m. Throws PreconditionError unless d_standoff > 0.
Vec3 plan_revisit(const Vec3& last_estimate, double approach_heading, double d_standoff);

struct MissionParams {
    double search_speed = 2.0;
    double approach_speed = 1.5;
    double altitude = 4.0;
    double lane_spacing = 10.0;
    int m_commit = 3;
    double align_tol_px = 30.0;
    double standoff = 6.0;
    double t_confirm = 5.0;
    double tip_offset = 0.5;  // manipulator tip ahead of the center of mass
    double tip_reach = 0.1;
    int retry_limit = 3;
    double claim_radius = 5.0;
    double waypoint_tol = 0.5;
    double cell_tolerance = 3.0;
    int max_sweeps = 3;
    double align_timeout = 10.0;
    double revisit_timeout = 60.0;
    double contact_range = 2.0;  // a target lost farther away is not presumed popped
    double yaw_gain = 1.5;
    double yaw_rate_limit = 1.0;
    YawMode yaw_mode = YawMode::HorizontalOffset;
};

enum class MissionEventKind { PhaseChange, ClaimGranted, ClaimDenied, ClaimReleased, ConfirmPopped, Abandoned };

std::string_view to_string(MissionEventKind k);

struct MissionEvent {
    MissionEventKind kind;
    Phase from = Phase::Search;
    Phase to = Phase::Search;
    std::string reason;
    int claim_id = -1;
    int track_id = -1;
    Vec3 point = Vec3::Zero();
};

// Everything an agent may read during its step. The claim table is the one
// shared object; the loop steps agents in ascending id so grants serialize.
struct MissionInputs {
    double time = 0.0;
    double dt = 0.05;
    const UavState* uav = nullptr;
    const Tracker* tracker = nullptr;
    const CameraIntrinsics* camera = nullptr;
    Mat3 mount = rotation_camera_to_body(CameraMount::Forward);
    double balloon_diameter = 0.45;
    const std::vector<Polygon>* own_cells = nullptr;
    Geofence fence;
    double fence_margin = 1.0;
    double v_max = 2.0;
};

struct MissionOutput {
    Vec3 velocity = Vec3::Zero();  // world frame, geofence-filtered
    double yaw_rate = 0.0;
    bool geofence_clamped = false;
    std::optional<GuidanceCommand> guidance;
    std::optional<int> target_track;
    std::vector<MissionEvent> events;
};

/// One agent's interception state machine: search, align, approach, revisit,
/// confirm.
class Mission {
public:
    Mission(int agent_id, MissionParams params = {}) : agent_(agent_id), params_(params) {}

    void assign_path(SearchPath path, const Vec2& from);

    MissionOutput step(const MissionInputs& in, ClaimTable& claims);

    /// Forces Done (agent failure); releases any claim.
    void fail(ClaimTable& claims, std::vector<MissionEvent>& events);

    Phase phase() const { return phase_; }
    double phase_entry_time() const { return phase_entry_; }
    std::optional<int> target_track() const { return target_; }
    std::optional<int> claim_id() const { return claim_; }
    const std::optional<Vec3>& last_estimate() const { return estimate_; }
    const SearchPath& path() const { return path_; }
    std::size_t next_waypoint() const { return wp_; }
    int retries() const { return retries_; }
    const MissionParams& params() const { return params_; }

    /// World position of a track's balloon from its fitted circle and the
    /// camera pose; empty when the circle is degenerate.
    static std::optional<Vec3> estimate_world(const Track& t, const MissionInputs& in);

private:
    void transition(Phase to, double time, std::string reason, MissionOutput& out);
    void release(ClaimTable& claims, ReleaseReason reason, MissionOutput& out);
    void resume_search(const Vec3& position);
    Vec3 fly_to(const Vec3& from, const Vec3& to, double speed) const;
    bool in_own_cells(const Vec3& p, const MissionInputs& in) const;
    bool blacklisted(const Vec3& p) const;
    bool consistent(const Track& track, const MissionInputs& in) const;
    void set_anchor(const Vec3& estimate, const Vec3& position);

    void step_search(const MissionInputs& in, ClaimTable& claims, MissionOutput& out);
    void step_align(const MissionInputs& in, ClaimTable& claims, MissionOutput& out);
    void step_approach(const MissionInputs& in, ClaimTable& claims, MissionOutput& out);
    void step_revisit(const MissionInputs& in, MissionOutput& out);
    void step_confirm(const MissionInputs& in, ClaimTable& claims, MissionOutput& out);

    int agent_;
    MissionParams params_;
    Phase phase_ = Phase::Search;
    double phase_entry_ = 0.0;

    SearchPath path_;
    std::vector<Vec3> waypoints_;
    std::vector<char> visited_;
    std::size_t wp_ = 0;
    int sweeps_ = 0;

    std::optional<int> target_;
    std::optional<int> claim_;
    std::optional<Vec3> estimate_;
    double approach_heading_ = 0.0;
    Vec3 revisit_point_ = Vec3::Zero();
    double lost_range_ = 0.0;
    std::optional<Vec3> anchor_;  // estimate at commit
    double anchor_tol_ = 0.0;
    int retries_ = 0;
    std::vector<Vec3> blacklist_;
    std::pair<int, int> last_denied_{-1, -1};
    bool failed_ = false;
};

}  // namespace bhsim
