#pragma once

#include "bhsim/geometry.hpp"
#include "bhsim/vehicle.hpp"

#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace bhsim {

struct PartitionCell {
    int agent_id = 0;
    Vec2 generator = Vec2::Zero();
    Polygon polygon;
};

struct Generator {
    int agent_id = 0;
    Vec2 point = Vec2::Zero();
};

/// Voronoi cells of `generators` clipped to `footprint`, one per generator
/// in input order, built by half-plane intersection. Throws
/// DuplicateGenerators for coincident generators and PreconditionError for
/// generators outside the footprint.
std::vector<PartitionCell> voronoi_partition(const Rect& footprint,
                                             const std::vector<Generator>& generators);

/// Same, with agent ids 0..n-1 taken from the generator order.
std::vector<PartitionCell> voronoi_partition(const Rect& footprint, const std::vector<Vec2>& generators);

/// Owner of `p`: among the cells containing it, the lowest agent id.
std::optional<int> locate_cell(const std::vector<PartitionCell>& cells, const Vec2& p);

enum class ReassignMode { Repartition, NearestNeighbor };

ReassignMode parse_reassign_mode(std::string_view s);
std::string_view to_string(ReassignMode m);

/// Hands the failed agent's area to the survivors. Repartition recomputes the
/// Voronoi diagram over the surviving generators; NearestNeighbor gives the
/// failed agent's cells to the survivor with the nearest generator.
/// Throws PreconditionError for an unknown agent and NoSurvivors when the
/// failed agent was the last one.
std::vector<PartitionCell> reassign_on_failure(const Rect& footprint,
                                               const std::vector<PartitionCell>& cells,
                                               int failed,
                                               ReassignMode mode = ReassignMode::Repartition);

struct Claim {
    int agent_id = 0;
    Vec3 estimate = Vec3::Zero();
    double radius = 5.0;
    double timestamp = 0.0;
};

enum class ReleaseReason { Popped, Abandoned };

std::string_view to_string(ReleaseReason r);

struct ClaimResult {
    bool granted = false;
    int claim_id = -1;  // the new claim, or the one that blocked the request
};

/// Exclusive, radius-guarded reservations of balloon estimates. Calls are
/// applied in the order they are made, which the simulation loop keeps in
/// ascending agent id within a tick.
class ClaimTable {
public:
    ClaimResult claim_target(int agent, const Vec3& estimate, double claim_radius, double time);

    /// Removes a claim. Throws UnknownClaim if it does not exist.
    void release_claim(int claim_id, ReleaseReason reason);

    /// Moves a claim to a fresh estimate unless that would bring it within
    /// radius of another claim. Returns whether the move was applied.
    bool refresh_claim(int claim_id, const Vec3& estimate, double time);

    std::optional<int> claim_of(int agent) const;
    const Claim* find(int claim_id) const;
    const std::map<int, Claim>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    /// Number of claim pairs closer than their radius (0 when the invariant holds).
    int conflicting_pairs() const;

private:
    std::map<int, Claim> entries_;
    int next_id_ = 0;
};

/// Hold flags, indexed like `agents`: for every alive pair closer than
/// `min_sep`, the agent with the higher id holds.
std::vector<bool> deconflict(const std::vector<UavState>& agents, double min_sep);

/// Removes from `velocity` the component closing on any other alive agent
/// within `radius` of `self`; when that leaves less than half the speed, the
/// agent sidesteps tangentially instead. Used on agents that proceed under
/// deconflict.
Vec3 separation_filter(const UavState& self, const std::vector<UavState>& agents, double radius,
                       const Vec3& velocity);

/// True when `velocity` closes on an alive agent within `radius`.
bool closes_on_neighbor(const UavState& self, const std::vector<UavState>& agents, double radius,
                        const Vec3& velocity);

// Footprint occupancy grid of area already swept by searching agents.
class CoverageGrid {
public:
    CoverageGrid() = default;
    CoverageGrid(const Rect& footprint, double resolution);

    void mark(const Vec2& p, double radius);
    bool swept(const Vec2& p) const;
    double swept_fraction() const;

private:
    bool index(const Vec2& p, int& ix, int& iy) const;

    Rect footprint_;
    double resolution_ = 1.0;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<char> cells_;
};

}  // namespace bhsim
