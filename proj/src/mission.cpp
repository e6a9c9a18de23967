#include "bhsim/mission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace bhsim {

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::Search: return "SEARCH";
        case Phase::Align: return "ALIGN";
        case Phase::Approach: return "APPROACH";
        case Phase::Revisit: return "REVISIT";
        case Phase::Confirm: return "CONFIRM";
        case Phase::Done: return "DONE";
    }
    return "?";
}

bool is_legal_transition(Phase from, Phase to) {
    if (to == Phase::Done) return from != Phase::Done;
    switch (from) {
        case Phase::Search: return to == Phase::Align;
        case Phase::Align: return to == Phase::Approach || to == Phase::Search;
        case Phase::Approach: return to == Phase::Revisit;
        case Phase::Revisit: return to == Phase::Confirm;
        case Phase::Confirm: return to == Phase::Align || to == Phase::Search;
        case Phase::Done: return to == Phase::Search;
    }
    return false;
}

std::string_view to_string(MissionEventKind k) {
    switch (k) {
        case MissionEventKind::PhaseChange: return "phase";
        case MissionEventKind::ClaimGranted: return "claim_granted";
        case MissionEventKind::ClaimDenied: return "claim_denied";
        case MissionEventKind::ClaimReleased: return "claim_released";
        case MissionEventKind::ConfirmPopped: return "confirm_popped";
        case MissionEventKind::Abandoned: return "abandoned";
    }
    return "?";
}

std::vector<Vec3> SearchPath::waypoints() const {
    std::vector<Vec3> out;
    for (const auto& lane : lanes) {
        for (const Vec3& p : {lane.start, lane.end})
            if (out.empty() || (out.back() - p).norm() > 1e-9) out.push_back(p);
    }
    return out;
}

SearchPath generate_search_path(const Polygon& cell, double altitude, double spacing) {
    if (!(spacing > 0.0)) throw PreconditionError("lane spacing must be > 0");
    if (cell.empty() || std::abs(area(cell)) < 1.0)
        throw DegenerateCell("cell area below 1 m^2");

    const Rect bb = bounding_box(cell);
    const Vec2 dims = bb.max - bb.min;
    const int axis = dims.x() >= dims.y() ? 0 : 1;
    const int cross = 1 - axis;
    const double width = dims[cross];
    const int n = std::max(1, static_cast<int>(std::ceil(width / spacing - 1e-9)));

    SearchPath path;
    path.spacing = spacing;
    path.altitude = altitude;
    bool forward = true;
    for (int i = 0; i < n; ++i) {
        const double offset = bb.min[cross] + (i + 0.5) * width / n;
        auto span = scanline(cell, axis, offset);
        if (!span || span->second - span->first < 1e-9) continue;
        Vec3 a = Vec3::Constant(altitude), b = Vec3::Constant(altitude);
        a[axis] = span->first;
        b[axis] = span->second;
        a[cross] = b[cross] = offset;
        path.lanes.push_back(forward ? Lane{a, b} : Lane{b, a});
        forward = !forward;
    }
    return path;
}

SearchPath orient_path(const SearchPath& path, const Vec2& start) {
    if (path.empty()) return path;
    SearchPath best = path;
    double best_d = std::numeric_limits<double>::infinity();
    for (int variant = 0; variant < 4; ++variant) {
        SearchPath p = path;
        if (variant & 1)
            for (auto& lane : p.lanes) std::swap(lane.start, lane.end);
        if (variant & 2) std::reverse(p.lanes.begin(), p.lanes.end());
        const double d = (p.lanes.front().start.head<2>() - start).norm();
        if (d < best_d - 1e-12) {
            best_d = d;
            best = std::move(p);
        }
    }
    return best;
}

SearchPath trim_to_unvisited(const SearchPath& path, const CoverageGrid& grid, double sample_step) {
    SearchPath out;
    out.spacing = path.spacing;
    out.altitude = path.altitude;
    const double half = 0.5 * path.spacing;
    for (const auto& lane : path.lanes) {
        const Vec3 d = lane.end - lane.start;
        const double len = d.norm();
        const int n = std::max(1, static_cast<int>(std::ceil(len / sample_step)));
        const Vec2 dir = d.head<2>() / std::max(len, 1e-12);
        const Vec2 normal{-dir.y(), dir.x()};
        const int m = std::max(1, static_cast<int>(std::ceil(half / sample_step)));

        std::vector<char> needed(n + 1, 0);
        for (int k = 0; k <= n; ++k) {
            const Vec2 s = (lane.start + d * (double(k) / n)).head<2>();
            for (int j = -m; j <= m && !needed[k]; ++j)
                if (!grid.swept(s + normal * (half * j / m))) needed[k] = 1;
        }
        for (int k = 0; k <= n;) {
            if (!needed[k]) {
                ++k;
                continue;
            }
            int e = k;
            while (e + 1 <= n && needed[e + 1]) ++e;
            const int a = std::max(0, k == e ? k - 1 : k);
            const int b = std::min(n, k == e ? e + 1 : e);
            out.lanes.push_back(Lane{lane.start + d * (double(a) / n), lane.start + d * (double(b) / n)});
            k = e + 1;
        }
    }
    return out;
}

bool should_commit(const Track& track, int m_commit) {
    return track.status == TrackStatus::Confirmed && track.hits >= m_commit;
}

bool check_pop(const Vec3& tip_position, const Vec3& balloon_center, double balloon_radius,
               double tip_reach) {
    if (!(balloon_radius > 0.0)) throw PreconditionError("balloon radius must be > 0");
    return (tip_position - balloon_center).norm() <= balloon_radius + tip_reach;
}

Vec3 plan_revisit(const Vec3& last_estimate, double approach_heading, double d_standoff) {
    if (!(d_standoff > 0.0)) throw PreconditionError("standoff must be > 0");
    Vec3 wp = last_estimate -
              d_standoff * Vec3{std::cos(approach_heading), std::sin(approach_heading), 0.0};
    wp.z() = std::clamp(wp.z(), 1.0, 5.0);
    return wp;
}

// --- Mission -----------------------------------------------------------------

void Mission::assign_path(SearchPath path, const Vec2& from) {
    path_ = orient_path(path, from);
    waypoints_ = path_.waypoints();
    visited_.assign(waypoints_.size(), 0);
    wp_ = 0;
    sweeps_ = 0;
}

std::optional<Vec3> Mission::estimate_world(const Track& t, const MissionInputs& in) {
    const FittedCircle circle = fit_circle(t.box());
    if (circle.radius < 0.5) return std::nullopt;
    const double depth = estimate_range(circle, *in.camera, in.balloon_diameter);
    return pixel_to_world(*in.camera, CameraPose::of(*in.uav, in.mount), circle.center, depth);
}

void Mission::transition(Phase to, double time, std::string reason, MissionOutput& out) {
    if (!is_legal_transition(phase_, to))
        throw InvariantViolation("illegal mission transition " + std::string(to_string(phase_)) +
                                 " -> " + std::string(to_string(to)));
    MissionEvent e{MissionEventKind::PhaseChange};
    e.from = phase_;
    e.to = to;
    e.reason = std::move(reason);
    e.track_id = target_.value_or(-1);
    e.claim_id = claim_.value_or(-1);
    out.events.push_back(std::move(e));
    phase_ = to;
    phase_entry_ = time;
}

void Mission::release(ClaimTable& claims, ReleaseReason reason, MissionOutput& out) {
    if (!claim_) return;
    claims.release_claim(*claim_, reason);
    MissionEvent e{MissionEventKind::ClaimReleased};
    e.claim_id = *claim_;
    e.reason = std::string(to_string(reason));
    if (estimate_) e.point = *estimate_;
    out.events.push_back(std::move(e));
    claim_.reset();
}

void Mission::fail(ClaimTable& claims, std::vector<MissionEvent>& events) {
    MissionOutput out;
    release(claims, ReleaseReason::Abandoned, out);
    if (phase_ != Phase::Done) transition(Phase::Done, phase_entry_, "agent failure", out);
    target_.reset();
    waypoints_.clear();
    visited_.clear();
    failed_ = true;
    events.insert(events.end(), out.events.begin(), out.events.end());
}

void Mission::resume_search(const Vec3& position) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < waypoints_.size(); ++i) {
        if (visited_[i]) continue;
        const double d = (waypoints_[i] - position).norm();
        if (d < best) {
            best = d;
            wp_ = i;
        }
    }
}

Vec3 Mission::fly_to(const Vec3& from, const Vec3& to, double speed) const {
    const Vec3 d = to - from;
    const double dist = d.norm();
    if (dist < 1e-9) return Vec3::Zero();
    return d * (std::min(speed, dist) / dist);
}

bool Mission::in_own_cells(const Vec3& p, const MissionInputs& in) const {
    if (!in.own_cells || in.own_cells->empty()) return true;
    return std::any_of(in.own_cells->begin(), in.own_cells->end(), [&](const Polygon& c) {
        return distance_to(c, p.head<2>()) <= params_.cell_tolerance;
    });
}

bool Mission::blacklisted(const Vec3& p) const {
    return std::any_of(blacklist_.begin(), blacklist_.end(),
                       [&](const Vec3& b) { return (b - p).norm() <= params_.claim_radius; });
}

namespace {

double heading_to(const Vec3& from, const Vec3& to, double fallback) {
    const Vec2 d = (to - from).head<2>();
    return d.norm() > 0.5 ? std::atan2(d.y(), d.x()) : fallback;
}

}  // namespace

MissionOutput Mission::step(const MissionInputs& in, ClaimTable& claims) {
    MissionOutput out;
    if (failed_) return out;

    if (phase_ == Phase::Done) {
        if (std::find(visited_.begin(), visited_.end(), 0) == visited_.end()) return out;
        sweeps_ = 0;
        transition(Phase::Search, in.time, "area assigned", out);
        resume_search(in.uav->position);
    }

    switch (phase_) {
        case Phase::Search: step_search(in, claims, out); break;
        case Phase::Align: step_align(in, claims, out); break;
        case Phase::Approach: step_approach(in, claims, out); break;
        case Phase::Revisit: step_revisit(in, out); break;
        case Phase::Confirm: step_confirm(in, claims, out); break;
        case Phase::Done: break;
    }

    const Vec3 filtered =
        clamp_to_geofence(in.uav->position, out.velocity, in.fence, in.fence_margin, in.v_max);
    out.geofence_clamped = (filtered - out.velocity).norm() > 1e-12;
    out.velocity = filtered;
    if (phase_ == Phase::Align || phase_ == Phase::Approach) out.target_track = target_;
    return out;
}

void Mission::step_search(const MissionInputs& in, ClaimTable& claims, MissionOutput& out) {
    const UavState& uav = *in.uav;

    std::vector<std::pair<int, double>> ranges;
    std::map<int, Vec3> estimates;
    for (const Track& t : in.tracker->tracks()) {
        if (!should_commit(t, params_.m_commit)) continue;
        auto est = estimate_world(t, in);
        if (!est || !in_own_cells(*est, in) || blacklisted(*est)) continue;
        ranges.emplace_back(t.id, (*est - uav.position).norm());
        estimates.emplace(t.id, *est);
    }
    for (int id : order_by_depth(ranges)) {
        const Vec3& est = estimates.at(id);
        const ClaimResult r = claims.claim_target(agent_, est, params_.claim_radius, in.time);
        if (!r.granted) {
            if (last_denied_ != std::make_pair(id, r.claim_id)) {
                MissionEvent e{MissionEventKind::ClaimDenied};
                e.track_id = id;
                e.claim_id = r.claim_id;
                e.point = est;
                out.events.push_back(std::move(e));
                last_denied_ = {id, r.claim_id};
            }
            continue;
        }
        claim_ = r.claim_id;
        target_ = id;
        estimate_ = est;
        set_anchor(est, in.uav->position);
        retries_ = 0;
        MissionEvent e{MissionEventKind::ClaimGranted};
        e.track_id = id;
        e.claim_id = r.claim_id;
        e.point = est;
        out.events.push_back(std::move(e));
        transition(Phase::Align, in.time, "commit", out);
        return;
    }

    if (waypoints_.empty()) {
        transition(Phase::Done, in.time, "no area", out);
        return;
    }
    if (std::find(visited_.begin(), visited_.end(), 0) == visited_.end()) {
        if (++sweeps_ >= params_.max_sweeps) {
            transition(Phase::Done, in.time, "search complete", out);
            return;
        }
        std::fill(visited_.begin(), visited_.end(), 0);
        resume_search(uav.position);
    }

    if ((waypoints_[wp_] - uav.position).norm() < params_.waypoint_tol) {
        visited_[wp_] = 1;
        std::size_t next = wp_ + 1;
        while (next < waypoints_.size() && visited_[next]) ++next;
        if (next < waypoints_.size())
            wp_ = next;
        else
            resume_search(uav.position);
        if (visited_[wp_]) return;  // sweep finished; handled next tick
    }

    const Vec3& target = waypoints_[wp_];
    out.velocity = fly_to(uav.position, target, params_.search_speed);
    const double psi = heading_to(uav.position, target, uav.yaw);
    out.yaw_rate = yaw_rate_command(psi, uav.yaw, params_.yaw_gain, params_.yaw_rate_limit);
}

void Mission::set_anchor(const Vec3& estimate, const Vec3& position) {
    anchor_ = estimate;
    anchor_tol_ = params_.claim_radius + 0.1 * (estimate - position).norm();
}

// A track whose world estimate jumps beyond the claim radius, or drifts far
// from where it was committed, has most likely switched to another balloon.
bool Mission::consistent(const Track& track, const MissionInputs& in) const {
    if (!estimate_ || track.misses != 0) return true;
    const auto est = estimate_world(track, in);
    if (!est) return true;
    if ((*est - *estimate_).norm() > params_.claim_radius) return false;
    return !anchor_ || (*est - *anchor_).norm() <= anchor_tol_;
}

void Mission::step_align(const MissionInputs& in, ClaimTable& claims, MissionOutput& out) {
    const UavState& uav = *in.uav;
    const Track* track = target_ ? in.tracker->find(*target_) : nullptr;
    if (track && !consistent(*track, in)) track = nullptr;
    const bool timed_out = in.time - phase_entry_ > params_.align_timeout;
    if (!track || timed_out) {
        if (timed_out && estimate_) blacklist_.push_back(*estimate_);
        release(claims, ReleaseReason::Abandoned, out);
        target_.reset();
        transition(Phase::Search, in.time, timed_out ? "align timeout" : "target lost", out);
        resume_search(uav.position);
        return;
    }
    if (track->misses == 0) {
        if (auto est = estimate_world(*track, in)) {
            estimate_ = est;
            if (claim_) claims.refresh_claim(*claim_, *est, in.time);
        }
    }

    const PixelTarget pt{track->center().x(), track->center().y(), in.camera->focal_px};
    if (auto yt = desired_yaw(pt, params_.yaw_mode)) {
        const double psi = yt->relative ? uav.yaw + yt->value : yt->value;
        out.yaw_rate = yaw_rate_command(psi, uav.yaw, params_.yaw_gain, params_.yaw_rate_limit);
    }
    if (std::abs(pt.p_x) < params_.align_tol_px) {
        approach_heading_ = uav.yaw;
        transition(Phase::Approach, in.time, "aligned", out);
    }
}

void Mission::step_approach(const MissionInputs& in, ClaimTable& claims, MissionOutput& out) {
    const UavState& uav = *in.uav;
    const Track* track = target_ ? in.tracker->find(*target_) : nullptr;
    if (track && !consistent(*track, in)) track = nullptr;
    if (!track) {
        const Vec3 last = estimate_.value_or(uav.position);
        lost_range_ = (last - uav.position).norm();
        const Geofence inner = in.fence.shrunk(in.fence_margin);
        revisit_point_ = plan_revisit(last, approach_heading_, params_.standoff)
                             .cwiseMax(inner.min)
                             .cwiseMin(inner.max);
        target_.reset();
        transition(Phase::Revisit, in.time, "target out of view", out);
        step_revisit(in, out);
        return;
    }
    if (track->misses == 0) {
        if (auto est = estimate_world(*track, in)) {
            estimate_ = est;
            if (claim_) claims.refresh_claim(*claim_, *est, in.time);
        }
    }
    approach_heading_ = uav.yaw;

    const PixelTarget pt{track->center().x(), track->center().y(), in.camera->focal_px};
    GuidanceCommand g = compute_guidance(pt, params_.approach_speed, uav.yaw, in.mount,
                                         params_.yaw_mode, params_.yaw_gain, params_.yaw_rate_limit);
    out.velocity = ned_to_world(g.v_vehicle);
    out.yaw_rate = g.yaw_rate_cmd;
    out.guidance = std::move(g);
}

void Mission::step_revisit(const MissionInputs& in, MissionOutput& out) {
    const UavState& uav = *in.uav;
    const Vec3 look_at = estimate_.value_or(revisit_point_);
    if ((revisit_point_ - uav.position).norm() < params_.waypoint_tol ||
        in.time - phase_entry_ > params_.revisit_timeout) {
        transition(Phase::Confirm, in.time, "at revisit point", out);
    }
    out.velocity = fly_to(uav.position, revisit_point_, params_.search_speed);
    const double psi = heading_to(uav.position, look_at, uav.yaw);
    out.yaw_rate = yaw_rate_command(psi, uav.yaw, params_.yaw_gain, params_.yaw_rate_limit);
}

void Mission::step_confirm(const MissionInputs& in, ClaimTable& claims, MissionOutput& out) {
    const UavState& uav = *in.uav;
    const Vec3 look_at = estimate_.value_or(revisit_point_);
    out.velocity = fly_to(uav.position, revisit_point_, params_.search_speed);
    const double psi = heading_to(uav.position, look_at, uav.yaw);
    out.yaw_rate = yaw_rate_command(psi, uav.yaw, params_.yaw_gain, params_.yaw_rate_limit);

    std::optional<int> found;
    Vec3 found_est = Vec3::Zero();
    double best = std::numeric_limits<double>::infinity();
    for (const Track& t : in.tracker->tracks()) {
        if (t.status != TrackStatus::Confirmed) continue;
        auto est = estimate_world(t, in);
        if (!est) continue;
        const double d = (*est - look_at).norm();
        if (d <= params_.claim_radius && d < best) {
            best = d;
            found = t.id;
            found_est = *est;
        }
    }

    if (found) {
        if (++retries_ > params_.retry_limit) {
            blacklist_.push_back(look_at);
            MissionEvent e{MissionEventKind::Abandoned};
            e.point = look_at;
            e.reason = "retry limit";
            out.events.push_back(std::move(e));
            release(claims, ReleaseReason::Abandoned, out);
            retries_ = 0;
            transition(Phase::Search, in.time, "retry limit", out);
            resume_search(uav.position);
            return;
        }
        target_ = found;
        estimate_ = found_est;
        set_anchor(found_est, uav.position);
        if (claim_) claims.refresh_claim(*claim_, found_est, in.time);
        transition(Phase::Align, in.time, "balloon still present", out);
        return;
    }

    if (in.time - phase_entry_ >= params_.t_confirm && lost_range_ > params_.contact_range) {
        // Lost from afar and gone from view: no evidence of contact.
        MissionEvent e{MissionEventKind::Abandoned};
        e.point = look_at;
        e.reason = "not found";
        out.events.push_back(std::move(e));
        release(claims, ReleaseReason::Abandoned, out);
        retries_ = 0;
        transition(Phase::Search, in.time, "not found", out);
        resume_search(uav.position);
        return;
    }
    if (in.time - phase_entry_ >= params_.t_confirm) {
        MissionEvent e{MissionEventKind::ConfirmPopped};
        e.point = look_at;
        e.claim_id = claim_.value_or(-1);
        out.events.push_back(std::move(e));
        release(claims, ReleaseReason::Popped, out);
        retries_ = 0;
        transition(Phase::Search, in.time, "confirmed popped", out);
        resume_search(uav.position);
    }
}

}  // namespace bhsim
