#pragma once

#include "bhsim/core.hpp"
#include "bhsim/rng.hpp"

#include <vector>

namespace bhsim {

/// Competition arena. World frame is north-east-up with `origin` at the
/// south-west ground corner of the outer walls; the effective volume is
/// centered horizontally inside the outer footprint and starts at ground.
struct Arena {
    Vec3 outer_extent{100.0, 40.0, 20.0};
    Vec3 effective_extent{90.0, 30.0, 5.0};
    Vec3 origin{0.0, 0.0, 0.0};
    double geofence_margin = 1.0;

    Vec3 effective_min() const;
    Vec3 effective_max() const;
    // Throws PreconditionError when the extents break their invariants.
    void validate() const;
};

struct Balloon {
    int id = 0;
    Vec3 anchor = Vec3::Zero();  // pole top
    double tether_length = 1.0;
    double diameter = 0.45;
    double sway_amplitude = 0.1;  // rad
    double sway_frequency = 0.2;  // Hz
    double sway_phase = 0.0;
    double sway_azimuth = 0.0;  // horizontal swing direction, rad from north
    bool alive = true;
    Vec3 center = Vec3::Zero();  // current position, refreshed by advance_world

    double radius() const { return 0.5 * diameter; }
};

struct WorldState {
    double time = 0.0;
    std::vector<Balloon> balloons;

    int alive_count() const;
    const Balloon& balloon(int id) const;
};

// Per-balloon parameters applied to every sampled balloon.
struct BalloonTemplate {
    double pole_height = 2.0;
    double tether_length = 1.0;
    double diameter = 0.45;
    double sway_amplitude = 0.1;
    double sway_frequency = 0.2;
};

inline constexpr int kDefaultPackingBudget = 10'000;

/// Rejection-samples `n` anchors uniformly over the effective footprint
/// (shrunk by the tether length so the swaying center never leaves it) with
/// pairwise anchor distance >= `min_sep`. Throws PackingInfeasible once
/// `max_rejections` candidates have been discarded.
std::vector<Balloon> sample_balloon_layout(Rng& rng, const Arena& arena, int n, double min_sep,
                                           const BalloonTemplate& tmpl = {},
                                           int max_rejections = kDefaultPackingBudget);

/// Draws sway azimuth and phase for every balloon from `rng`.
void randomize_sway(Rng& rng, std::vector<Balloon>& balloons);

/// Planar pendulum sway: theta(t) = A sin(2 pi f t + phase), center =
/// anchor + L (sin(theta) * azimuth direction, cos(theta) up). The balloon
/// floats above its mount, so zero amplitude puts it at anchor + (0, 0, L).
Vec3 step_balloon_sway(const Balloon& balloon, double t);

/// Sets `time` and refreshes the center of every alive balloon.
void advance_world(WorldState& world, double t);

/// Marks balloon `id` popped. Idempotent; throws UnknownBalloon.
WorldState pop_balloon(WorldState world, int id);

}  // namespace bhsim
