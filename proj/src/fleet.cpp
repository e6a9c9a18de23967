#include "bhsim/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bhsim {

std::vector<PartitionCell> voronoi_partition(const Rect& footprint,
                                             const std::vector<Generator>& generators) {
    for (std::size_t i = 0; i < generators.size(); ++i) {
        if (!footprint.contains(generators[i].point))
            throw PreconditionError("generator of agent " + std::to_string(generators[i].agent_id) +
                                    " lies outside the footprint");
        for (std::size_t j = i + 1; j < generators.size(); ++j)
            if ((generators[i].point - generators[j].point).norm() < 1e-9)
                throw DuplicateGenerators("agents " + std::to_string(generators[i].agent_id) +
                                          " and " + std::to_string(generators[j].agent_id) +
                                          " share a generator");
    }

    std::vector<PartitionCell> cells;
    cells.reserve(generators.size());
    for (const auto& gi : generators) {
        Polygon poly = to_polygon(footprint);
        for (const auto& gj : generators) {
            if (gj.agent_id == gi.agent_id && gj.point == gi.point) continue;
            // |p - gi|^2 <= |p - gj|^2  <=>  2 (gj - gi) . p <= |gj|^2 - |gi|^2
            const Vec2 normal = 2.0 * (gj.point - gi.point);
            const double offset = gj.point.squaredNorm() - gi.point.squaredNorm();
            poly = clip_halfplane(poly, normal, offset);
            if (poly.empty()) break;
        }
        cells.push_back(PartitionCell{gi.agent_id, gi.point, std::move(poly)});
    }
    return cells;
}

std::vector<PartitionCell> voronoi_partition(const Rect& footprint, const std::vector<Vec2>& generators) {
    std::vector<Generator> g;
    for (std::size_t i = 0; i < generators.size(); ++i)
        g.push_back(Generator{static_cast<int>(i), generators[i]});
    return voronoi_partition(footprint, g);
}

std::optional<int> locate_cell(const std::vector<PartitionCell>& cells, const Vec2& p) {
    std::optional<int> best;
    for (const auto& c : cells)
        if (contains(c.polygon, p) && (!best || c.agent_id < *best)) best = c.agent_id;
    return best;
}

ReassignMode parse_reassign_mode(std::string_view s) {
    if (s == "repartition") return ReassignMode::Repartition;
    if (s == "nearest_neighbor") return ReassignMode::NearestNeighbor;
    throw PreconditionError("unknown reassign mode '" + std::string(s) + "'");
}

std::string_view to_string(ReassignMode m) {
    return m == ReassignMode::Repartition ? "repartition" : "nearest_neighbor";
}

std::vector<PartitionCell> reassign_on_failure(const Rect& footprint,
                                               const std::vector<PartitionCell>& cells, int failed,
                                               ReassignMode mode) {
    auto failed_it = std::find_if(cells.begin(), cells.end(),
                                  [failed](const PartitionCell& c) { return c.agent_id == failed; });
    if (failed_it == cells.end())
        throw PreconditionError("agent " + std::to_string(failed) + " holds no cell");

    // one generator per surviving agent, ascending id
    std::map<int, Vec2> survivors;
    for (const auto& c : cells)
        if (c.agent_id != failed) survivors.emplace(c.agent_id, c.generator);
    if (survivors.empty()) throw NoSurvivors("agent " + std::to_string(failed) + " was the last one");

    if (mode == ReassignMode::Repartition) {
        std::vector<Generator> g;
        for (const auto& [id, p] : survivors) g.push_back(Generator{id, p});
        return voronoi_partition(footprint, g);
    }

    const Vec2 failed_gen = failed_it->generator;
    int heir = survivors.begin()->first;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [id, p] : survivors) {
        const double d = (p - failed_gen).norm();
        if (d < best) {
            best = d;
            heir = id;
        }
    }
    std::vector<PartitionCell> out = cells;
    for (auto& c : out) {
        if (c.agent_id == failed) {
            c.agent_id = heir;
            c.generator = survivors.at(heir);
        }
    }
    return out;
}

std::string_view to_string(ReleaseReason r) {
    return r == ReleaseReason::Popped ? "popped" : "abandoned";
}

ClaimResult ClaimTable::claim_target(int agent, const Vec3& estimate, double claim_radius,
                                     double time) {
    if (auto held = claim_of(agent)) return ClaimResult{false, *held};
    for (const auto& [id, c] : entries_)
        if ((c.estimate - estimate).norm() <= std::max(claim_radius, c.radius))
            return ClaimResult{false, id};
    const int id = next_id_++;
    entries_.emplace(id, Claim{agent, estimate, claim_radius, time});
    return ClaimResult{true, id};
}

void ClaimTable::release_claim(int claim_id, ReleaseReason) {
    if (entries_.erase(claim_id) == 0)
        throw UnknownClaim("claim " + std::to_string(claim_id) + " does not exist");
}

bool ClaimTable::refresh_claim(int claim_id, const Vec3& estimate, double time) {
    auto it = entries_.find(claim_id);
    if (it == entries_.end()) throw UnknownClaim("claim " + std::to_string(claim_id) + " does not exist");
    for (const auto& [id, c] : entries_) {
        if (id == claim_id) continue;
        if ((c.estimate - estimate).norm() <= std::max(it->second.radius, c.radius)) return false;
    }
    it->second.estimate = estimate;
    it->second.timestamp = time;
    return true;
}

std::optional<int> ClaimTable::claim_of(int agent) const {
    for (const auto& [id, c] : entries_)
        if (c.agent_id == agent) return id;
    return std::nullopt;
}

const Claim* ClaimTable::find(int claim_id) const {
    auto it = entries_.find(claim_id);
    return it == entries_.end() ? nullptr : &it->second;
}

int ClaimTable::conflicting_pairs() const {
    int n = 0;
    for (auto a = entries_.begin(); a != entries_.end(); ++a)
        for (auto b = std::next(a); b != entries_.end(); ++b)
            if ((a->second.estimate - b->second.estimate).norm() <=
                std::max(a->second.radius, b->second.radius))
                ++n;
    return n;
}

std::vector<bool> deconflict(const std::vector<UavState>& agents, double min_sep) {
    if (!(min_sep > 0.0)) throw PreconditionError("min_sep must be > 0");
    std::vector<bool> hold(agents.size(), false);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!agents[i].alive) continue;
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            if (!agents[j].alive) continue;
            if ((agents[i].position - agents[j].position).norm() < min_sep)
                hold[agents[i].id > agents[j].id ? i : j] = true;
        }
    }
    return hold;
}

Vec3 separation_filter(const UavState& self, const std::vector<UavState>& agents, double radius,
                       const Vec3& velocity) {
    Vec3 v = velocity;
    for (const auto& other : agents) {
        if (other.id == self.id || !other.alive) continue;
        const Vec3 d = other.position - self.position;
        const double dist = d.norm();
        if (dist >= radius || dist < 1e-12) continue;
        const Vec3 n = d / dist;
        const double closing = v.dot(n);
        if (closing <= 0.0) continue;
        v -= closing * n;
        // Mostly blocked: slide around the neighbor keeping it on the left.
        if (v.norm() < 0.5 * velocity.norm()) {
            const Vec3 side{n.y(), -n.x(), 0.0};
            if (side.norm() > 1e-9) v = side.normalized() * velocity.norm();
        }
    }
    return v;
}

bool closes_on_neighbor(const UavState& self, const std::vector<UavState>& agents, double radius,
                        const Vec3& velocity) {
    for (const auto& other : agents) {
        if (other.id == self.id || !other.alive) continue;
        const Vec3 d = other.position - self.position;
        if (d.norm() < radius && velocity.dot(d) > 1e-12) return true;
    }
    return false;
}

CoverageGrid::CoverageGrid(const Rect& footprint, double resolution)
    : footprint_(footprint), resolution_(resolution) {
    nx_ = std::max(1, static_cast<int>(std::ceil((footprint.max.x() - footprint.min.x()) / resolution)));
    ny_ = std::max(1, static_cast<int>(std::ceil((footprint.max.y() - footprint.min.y()) / resolution)));
    cells_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
}

bool CoverageGrid::index(const Vec2& p, int& ix, int& iy) const {
    if (cells_.empty()) return false;
    ix = static_cast<int>(std::floor((p.x() - footprint_.min.x()) / resolution_));
    iy = static_cast<int>(std::floor((p.y() - footprint_.min.y()) / resolution_));
    ix = std::clamp(ix, 0, nx_ - 1);
    iy = std::clamp(iy, 0, ny_ - 1);
    return footprint_.contains(p);
}

void CoverageGrid::mark(const Vec2& p, double radius) {
    if (cells_.empty()) return;
    const int r = static_cast<int>(std::ceil(radius / resolution_)) + 1;
    const int cx = static_cast<int>(std::floor((p.x() - footprint_.min.x()) / resolution_));
    const int cy = static_cast<int>(std::floor((p.y() - footprint_.min.y()) / resolution_));
    for (int ix = std::max(0, cx - r); ix <= std::min(nx_ - 1, cx + r); ++ix) {
        for (int iy = std::max(0, cy - r); iy <= std::min(ny_ - 1, cy + r); ++iy) {
            const Vec2 c = footprint_.min + resolution_ * Vec2{ix + 0.5, iy + 0.5};
            if ((c - p).norm() <= radius) cells_[static_cast<std::size_t>(iy) * nx_ + ix] = 1;
        }
    }
}

bool CoverageGrid::swept(const Vec2& p) const {
    int ix = 0, iy = 0;
    if (!index(p, ix, iy)) return true;  // outside the footprint: nothing to search
    return cells_[static_cast<std::size_t>(iy) * nx_ + ix] != 0;
}

double CoverageGrid::swept_fraction() const {
    if (cells_.empty()) return 0.0;
    return static_cast<double>(std::count(cells_.begin(), cells_.end(), 1)) / cells_.size();
}

}  // namespace bhsim
