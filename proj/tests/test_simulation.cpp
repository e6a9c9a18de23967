#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bhsim/simulation.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bhsim;

namespace {

Scenario zero_noise(std::uint64_t seed) {
    Scenario s;
    s.seed = seed;
    s.noise = NoiseModel::zero();
    return s;
}

std::string run_log(const Scenario& s, RunMetrics* m = nullptr) {
    std::ostringstream os;
    EventLog log(&os);
    const RunMetrics r = run_simulation(s, log);
    if (m) *m = r;
    return os.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("repeated runs give byte-identical logs") {
    Scenario s;
    s.seed = 17;
    s.fleet.agents = 2;
    s.duration_limit = 120;
    RunMetrics a, b;
    const std::string la = run_log(s, &a), lb = run_log(s, &b);
    CHECK(la == lb);
    CHECK(a.event_digest == b.event_digest);
    CHECK(metrics_csv_row(a) == metrics_csv_row(b));
    s.seed = 18;
    CHECK(run_log(s) != la);
}

TEST_CASE("no balloons ends at once") {
    Scenario s;
    s.balloon_count = 0;
    const RunMetrics m = run_simulation(s);
    CHECK(m.balloons_popped == 0);
    CHECK(m.end_time == 0.0);
    CHECK(m.all_popped());
}

TEST_CASE("noise-free single agent pops all five") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        CAPTURE(seed);
        const RunMetrics m = run_simulation(zero_noise(seed));
        CHECK(m.balloons_initial == 5);
        CHECK(m.balloons_popped == 5);
        CHECK(m.end_time < 600.0);
        CHECK(m.false_confirms == 0);
        CHECK(m.geofence_violations == 0);
        CHECK(m.max_speed <= 2.0 + 1e-9);
        int timed = 0;
        for (const auto& t : m.pop_times) timed += t.has_value();
        CHECK(timed == 5);
    }
}

TEST_CASE("three agents with a failure keep the fleet invariants") {
    Scenario s = zero_noise(1);
    s.fleet.agents = 3;
    s.fleet.failures = {{1, 30.0}};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        CAPTURE(seed);
        s.seed = seed;
        std::ostringstream os;
        EventLog log(&os);
        const RunMetrics m = run_simulation(s, log);
        CHECK(m.balloons_popped == 5);
        CHECK(m.claim_conflict_ticks == 0);
        CHECK(m.target_conflict_ticks == 0);
        CHECK(m.geofence_violations == 0);
        CHECK(m.false_confirms == 0);
        CHECK(m.min_inter_agent_distance >= s.fleet.min_sep - s.vehicle.v_max * s.dt());
        REQUIRE(m.distance_flown.size() == 3);

        // the failed agent goes quiet after its failure record
        std::istringstream is(os.str());
        double failed_at = -1;
        for (std::string line; std::getline(is, line);) {
            const EventRecord r = EventRecord::parse(line);
            if (r.kind == EventKind::Failure) failed_at = r.time;
            if (failed_at >= 0 && r.agent == 1 && r.time > failed_at) FAIL("event from failed agent");
        }
        CHECK(failed_at == doctest::Approx(30.0));
    }
}

TEST_CASE("sweep rows match single runs") {
    Scenario s;
    s.duration_limit = 200;
    const SweepResult one = sweep(s, {4});
    REQUIRE(one.rows.size() == 1);
    s.seed = 4;
    CHECK(metrics_csv_row(one.rows[0]) == metrics_csv_row(run_simulation(s)));
    CHECK(one.aggregate.runs == 1);
}

TEST_CASE("parallel sweep equals sequential sweep") {
    Scenario s;
    s.duration_limit = 150;
    s.fleet.agents = 2;
    const std::vector<std::uint64_t> seeds{9, 3, 7, 1, 5, 2};
    const auto dir = std::filesystem::temp_directory_path() / "bhsim_test_sweep";
    std::filesystem::remove_all(dir);
    const SweepResult a = sweep(s, seeds, 1, dir / "a");
    const SweepResult b = sweep(s, seeds, 4, dir / "b");
    REQUIRE(a.rows.size() == seeds.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(metrics_csv_row(a.rows[i]) == metrics_csv_row(b.rows[i]));
        if (i) CHECK(a.rows[i - 1].seed < a.rows[i].seed);
    }
    for (auto seed : seeds) {
        const std::string name = "events_" + std::to_string(seed) + ".jsonl";
        const std::string x = slurp(dir / "a" / name);
        CHECK(!x.empty());
        CHECK(x == slurp(dir / "b" / name));
        Scenario t = s;
        t.seed = seed;
        CHECK(x == run_log(t));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("aggregate statistics") {
    std::vector<RunMetrics> rows(4);
    for (int i = 0; i < 4; ++i) {
        rows[i].seed = i;
        rows[i].balloons_initial = 5;
        rows[i].balloons_popped = i == 0 ? 3 : 5;
        rows[i].end_time = 100.0 * (i + 1);
    }
    rows[3].error = "InvariantViolation: test";
    const SweepAggregate a = aggregate(rows);
    CHECK(a.runs == 4);
    CHECK(a.failed_runs == 1);
    CHECK(a.success_rate == doctest::Approx(0.5));
    CHECK(a.popped_min == 3);
    CHECK(a.popped_max == 5);
    CHECK(a.end_time_max == doctest::Approx(300.0));  // failed rows excluded
}

TEST_CASE("csv layout") {
    const std::string header = metrics_csv_header();
    CHECK(header.rfind("seed,balloons,popped,all_popped", 0) == 0);
    RunMetrics m;
    m.seed = 3;
    m.balloons_initial = 5;
    const std::string row = metrics_csv_row(m);
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
}

TEST_CASE("invalid scenarios are rejected before running") {
    Scenario s;
    s.tick_rate = 0;
    CHECK_THROWS_AS(run_simulation(s), ValidationError);
}

TEST_CASE("partition and paths for the scenario") {
    Scenario s;
    s.fleet.agents = 3;
    const auto cells = initial_partition(s);
    REQUIRE(cells.size() == 3);
    double total = 0;
    for (const auto& c : cells) total += area(c.polygon);
    CHECK(total == doctest::Approx(s.footprint().area()));
    const auto paths = initial_paths(s);
    REQUIRE(paths.size() == 3);
    const auto starts = s.agent_starts();
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE_FALSE(paths[i].empty());
        for (const Vec3& w : paths[i].waypoints()) CHECK(contains(cells[i].polygon, w.head<2>(), 1e-6));
    }
}
