#include "bhsim/world.hpp"

#include <algorithm>
#include <string>

namespace bhsim {

Vec3 Arena::effective_min() const {
    Vec3 inset = 0.5 * (outer_extent - effective_extent);
    return origin + Vec3{inset.x(), inset.y(), 0.0};
}

Vec3 Arena::effective_max() const { return effective_min() + effective_extent; }

void Arena::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (!(outer_extent[i] > 0.0) || !(effective_extent[i] > 0.0))
            throw PreconditionError("arena extents must be strictly positive");
        if (effective_extent[i] > outer_extent[i])
            throw PreconditionError("effective extent exceeds outer extent");
    }
    if (geofence_margin < 0.0) throw PreconditionError("geofence margin must be >= 0");
}

int WorldState::alive_count() const {
    return static_cast<int>(std::count_if(balloons.begin(), balloons.end(),
                                          [](const Balloon& b) { return b.alive; }));
}

const Balloon& WorldState::balloon(int id) const {
    auto it = std::find_if(balloons.begin(), balloons.end(),
                           [id](const Balloon& b) { return b.id == id; });
    if (it == balloons.end()) throw UnknownBalloon("no balloon with id " + std::to_string(id));
    return *it;
}

std::vector<Balloon> sample_balloon_layout(Rng& rng, const Arena& arena, int n, double min_sep,
                                           const BalloonTemplate& tmpl, int max_rejections) {
    if (n < 0) throw PreconditionError("balloon count must be >= 0");
    if (min_sep < 0.0) throw PreconditionError("min_sep must be >= 0");

    std::vector<Balloon> out;
    if (n == 0) return out;

    const Vec3 lo = arena.effective_min();
    const Vec3 hi = arena.effective_max();
    const double inset = tmpl.tether_length;
    if (lo.x() + inset >= hi.x() - inset || lo.y() + inset >= hi.y() - inset)
        throw PackingInfeasible("effective footprint smaller than the sway envelope");
    if (lo.z() + tmpl.pole_height + tmpl.tether_length > hi.z())
        throw PackingInfeasible("balloon center would exceed the effective height");

    std::uniform_real_distribution<double> ux(lo.x() + inset, hi.x() - inset);
    std::uniform_real_distribution<double> uy(lo.y() + inset, hi.y() - inset);

    int rejections = 0;
    while (static_cast<int>(out.size()) < n) {
        Vec3 anchor{ux(rng), uy(rng), lo.z() + tmpl.pole_height};
        bool ok = std::all_of(out.begin(), out.end(), [&](const Balloon& b) {
            return (b.anchor - anchor).norm() >= min_sep;
        });
        if (!ok) {
            if (++rejections >= max_rejections)
                throw PackingInfeasible("placed " + std::to_string(out.size()) + " of " +
                                        std::to_string(n) + " balloons after " +
                                        std::to_string(rejections) + " rejections");
            continue;
        }
        Balloon b;
        b.id = static_cast<int>(out.size());
        b.anchor = anchor;
        b.tether_length = tmpl.tether_length;
        b.diameter = tmpl.diameter;
        b.sway_amplitude = tmpl.sway_amplitude;
        b.sway_frequency = tmpl.sway_frequency;
        b.center = step_balloon_sway(b, 0.0);
        out.push_back(b);
    }
    return out;
}

void randomize_sway(Rng& rng, std::vector<Balloon>& balloons) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (auto& b : balloons) {
        b.sway_azimuth = angle(rng);
        b.sway_phase = angle(rng);
        b.center = step_balloon_sway(b, 0.0);
    }
}

Vec3 step_balloon_sway(const Balloon& balloon, double t) {
    const double theta =
        balloon.sway_amplitude *
        std::sin(2.0 * kPi * balloon.sway_frequency * t + balloon.sway_phase);
    const double horizontal = balloon.tether_length * std::sin(theta);
    return balloon.anchor + Vec3{horizontal * std::cos(balloon.sway_azimuth),
                                 horizontal * std::sin(balloon.sway_azimuth),
                                 balloon.tether_length * std::cos(theta)};
}

void advance_world(WorldState& world, double t) {
    world.time = t;
    for (auto& b : world.balloons)
        if (b.alive) b.center = step_balloon_sway(b, t);
}

WorldState pop_balloon(WorldState world, int id) {
    auto it = std::find_if(world.balloons.begin(), world.balloons.end(),
                           [id](const Balloon& b) { return b.id == id; });
    if (it == world.balloons.end())
        throw UnknownBalloon("no balloon with id " + std::to_string(id));
    it->alive = false;
    return world;
}

}  // namespace bhsim
