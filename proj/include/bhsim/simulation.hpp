#pragma once

#include "bhsim/event_log.hpp"
#include "bhsim/fleet.hpp"
#include "bhsim/mission.hpp"
#include "bhsim/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bhsim {

struct RunMetrics {
    std::uint64_t seed = 0;
    int balloons_initial = 0;
    int balloons_popped = 0;
    double end_time = 0.0;
    double pops_total_time = 0.0;  // time of the last pop, 0 without pops
    std::vector<std::optional<double>> pop_times;  // per balloon id
    int confirms = 0;
    int false_confirms = 0;
    int geofence_violations = 0;
    double min_inter_agent_distance = std::numeric_limits<double>::infinity();
    int claim_conflict_ticks = 0;
    int target_conflict_ticks = 0;
    double max_speed = 0.0;
    std::vector<double> distance_flown;
    std::uint64_t event_count = 0;
    std::uint64_t event_digest = 0;
    std::string error;  // non-empty for a failed sweep row

    bool all_popped() const { return error.empty() && balloons_popped == balloons_initial; }
};

/// Voronoi cells for the scenario's agent starts.
std::vector<PartitionCell> initial_partition(const Scenario& s);

/// Per-agent search paths over the initial partition, oriented from each start.
std::vector<SearchPath> initial_paths(const Scenario& s);

/// Runs one scenario to completion.
///
/// Fixed-step loop at 1 / tick_rate. Each tick: world step, fleet step
/// (scheduled failures, reallocation, deconfliction), then for every alive
/// agent in ascending id perceive, track, run the mission (which claims,
/// guides, and geofence-filters), and integrate the vehicle; finally pop
/// checks and metric bookkeeping. Stops at duration_limit or when no
/// balloon is left. Throws InvariantViolation after logging a diagnostic.
RunMetrics run_simulation(const Scenario& s, EventLog& log);
RunMetrics run_simulation(const Scenario& s);

struct SweepAggregate {
    int runs = 0;
    int failed_runs = 0;
    double success_rate = 0.0;
    double popped_mean = 0.0;
    int popped_min = 0;
    int popped_max = 0;
    double end_time_mean = 0.0;
    double end_time_min = 0.0;
    double end_time_max = 0.0;
};

struct SweepResult {
    std::vector<RunMetrics> rows;  // ascending seed
    SweepAggregate aggregate;
};

/// Runs `seeds` independently, up to `jobs` at a time. With `out_dir`, each
/// run writes events_<seed>.jsonl. Failed runs become rows with `error` set.
SweepResult sweep(const Scenario& s, const std::vector<std::uint64_t>& seeds, int jobs = 1,
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);

SweepAggregate aggregate(const std::vector<RunMetrics>& rows);

std::string metrics_csv_header();
std::string metrics_csv_row(const RunMetrics& m);
std::string aggregate_csv(const SweepAggregate& a);

}  // namespace bhsim
