// bhsim command-line front end: simulate, sweep, path, partition.

#include "bhsim/simulation.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

namespace {

enum Exit { kOk = 0, kConfig = 1, kInvariant = 2, kIo = 3 };

void configure_logging() {
    const char* env = std::getenv("BHSIM_LOG_LEVEL");
    const std::string level = env ? env : "info";
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::set_level(spdlog::level::info);
    if (level != "error" && level != "info" && level != "debug")
        spdlog::warn("unknown BHSIM_LOG_LEVEL '{}', using info", level);
    spdlog::set_pattern("[%l] %v");
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    auto number = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw bhsim::ParseError("seeds", "bad seed range '" + text + "'");
        return v;
    };
    std::uint64_t a, b;
    if (dots == std::string::npos) {
        a = b = number(text);
    } else {
        a = number(std::string_view(text).substr(0, dots));
        b = number(std::string_view(text).substr(dots + 2));
    }
    if (b < a) throw bhsim::ParseError("seeds", "empty seed range '" + text + "'");
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = a;; ++s) {
        seeds.push_back(s);
        if (s == b) break;
    }
    return seeds;
}

std::filesystem::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw bhsim::IoError("cannot create " + dir + ": " + ec.message());
    return dir;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw bhsim::IoError("cannot write " + p.string());
    return f;
}

void write_partition(std::ostream& os, const std::vector<bhsim::PartitionCell>& cells) {
    for (const auto& c : cells) {
        os << fmt::format("cell {} {} {} {}\n", c.agent_id, c.generator.x(), c.generator.y(),
                          c.polygon.vertices.size());
        for (const auto& v : c.polygon.vertices) os << fmt::format("{} {}\n", v.x(), v.y());
    }
}

void write_paths(std::ostream& os, const std::vector<bhsim::SearchPath>& paths) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto wps = paths[i].waypoints();
        os << fmt::format("path {} {} {}\n", i, paths[i].spacing, wps.size());
        for (const auto& w : wps) os << fmt::format("{} {} {}\n", w.x(), w.y(), w.z());
    }
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"bhsim: multi-UAV balloon interception simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, seeds_text;
    std::optional<std::uint64_t> seed;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto* simulate = app.add_subcommand("simulate", "run one scenario");
    simulate->add_option("--scenario", scenario_path, "scenario file")->required();
    simulate->add_option("--seed", seed, "master seed (overrides the file)");
    simulate->add_option("--out", out_dir, "output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "run a seed range");
    sweep->add_option("--scenario", scenario_path, "scenario file")->required();
    sweep->add_option("--seeds", seeds_text, "seed range A..B")->required();
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

    auto* path = app.add_subcommand("path", "dump search paths");
    path->add_option("--scenario", scenario_path, "scenario file")->required();
    path->add_option("--out", out_dir, "output file (default stdout)");

    auto* partition = app.add_subcommand("partition", "dump Voronoi cells");
    partition->add_option("--scenario", scenario_path, "scenario file")->required();
    partition->add_option("--out", out_dir, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        bhsim::Scenario s = bhsim::load_scenario(scenario_path);
        if (seed) s.seed = *seed;
        s.validate();

        if (*simulate) {
            const auto dir = prepare_dir(out_dir);
            auto events = open_out(dir / "events.jsonl");
            bhsim::EventLog log(&events);
            spdlog::info("simulating {} (seed {})", scenario_path, s.seed);
            const auto m = bhsim::run_simulation(s, log);
            auto csv = open_out(dir / "metrics.csv");
            csv << bhsim::metrics_csv_header() << '\n' << bhsim::metrics_csv_row(m) << '\n';
            spdlog::info("popped {}/{} at t={:.2f}s, {} events", m.balloons_popped, m.balloons_initial, m.end_time,
                         m.event_count);
        } else if (*sweep) {
            const auto seeds = parse_seed_range(seeds_text);
            const auto dir = prepare_dir(out_dir);
            spdlog::info("sweeping {} seeds with {} jobs", seeds.size(), jobs);
            const auto r = bhsim::sweep(s, seeds, jobs, dir);
            auto csv = open_out(dir / "metrics.csv");
            csv << bhsim::metrics_csv_header() << '\n';
            for (const auto& row : r.rows) {
                csv << bhsim::metrics_csv_row(row) << '\n';
                if (!row.error.empty()) spdlog::error("seed {}: {}", row.seed, row.error);
                else spdlog::debug("seed {}: popped {}/{}", row.seed, row.balloons_popped, row.balloons_initial);
            }
            auto agg = open_out(dir / "aggregate.csv");
            agg << bhsim::aggregate_csv(r.aggregate);
            spdlog::info("success rate {:.3f}, mean popped {:.2f}", r.aggregate.success_rate, r.aggregate.popped_mean);
        } else {
            std::ofstream file;
            if (!out_dir.empty()) file = open_out(out_dir);
            std::ostream& os = out_dir.empty() ? std::cout : file;
            if (*path) write_paths(os, bhsim::initial_paths(s));
            else write_partition(os, bhsim::initial_partition(s));
        }
    } catch (const bhsim::ConfigError& e) {
        spdlog::error("config: {}", e.what());
        return kConfig;
    } catch (const bhsim::IoError& e) {
        spdlog::error("io: {}", e.what());
        return kIo;
    } catch (const bhsim::InvariantViolation& e) {
        spdlog::error("invariant: {}", e.what());
        return kInvariant;
    } catch (const bhsim::Error& e) {
        spdlog::error("{}: {}", e.kind(), e.what());
        return kConfig;
    }
    return kOk;
}
