// Command line front end: run one scenario or a seed range.
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wavefront/scenario.hpp"

namespace {

enum class Verbosity { quiet = 0, info = 1, debug = 2 };

Verbosity verbosity() {
    const char* env = std::getenv("WAVEFRONT_LOG");
    if (!env) return Verbosity::info;
    const std::string v = env;
    if (v == "quiet" || v == "0" || v == "error") return Verbosity::quiet;
    if (v == "debug" || v == "2") return Verbosity::debug;
    return Verbosity::info;
}

void log(Verbosity level, const std::string& msg) {
    if (static_cast<int>(level) <= static_cast<int>(verbosity())) std::cerr << msg << '\n';
}

void print_summary(const wavefront::Report& report) {
    for (const auto& [name, s] : report.summary()) {
        log(Verbosity::debug, "  " + name + ": " + std::to_string(s.count) + " checks, " + std::to_string(s.failures) +
                                  " failures, min slack " + wavefront::format_number(s.min_slack));
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace wavefront;
    CLI::App app{"Wavefront tracking for a triangular system with runtime interaction estimates"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string level;
    std::string out;
    bool snapshots = false;
    auto* run = app.add_subcommand("run", "Run one scenario and write events.csv, functionals.csv, report.json");
    run->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    auto* seed_opt = run->add_option("--seed", seed, "Override the random seed");
    run->add_option("--check-level", level, "fast, full or small_n")->check(CLI::IsMember({"fast", "full", "small_n"}));
    run->add_option("--out", out, "Output directory");
    run->add_flag("--snapshots", snapshots, "Also write snapshots.json");

    std::string seeds;
    std::string batch_config;
    std::string batch_out;
    std::string batch_level;
    unsigned jobs = 0;
    auto* bat = app.add_subcommand("batch", "Run a seed range in parallel and aggregate the reports");
    bat->add_option("--seeds", seeds, "Inclusive range A..B")->required();
    bat->add_option("--config", batch_config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    bat->add_option("--out", batch_out, "Directory for per-seed output and summary.json");
    bat->add_option("--check-level", batch_level, "fast, full or small_n")
        ->check(CLI::IsMember({"fast", "full", "small_n"}));
    bat->add_option("--jobs", jobs, "Parallel runs (default: hardware threads)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ScenarioConfig c = load_config(config_path);
            if (*seed_opt) c.seed = seed;
            if (!level.empty()) c.level = parse_check_level(level);
            if (!out.empty()) c.output_dir = out;
            if (snapshots) c.snapshots = true;
            const auto start = std::chrono::steady_clock::now();
            const ScenarioOutcome o = run_scenario(c);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const auto& t = o.trajectory;
            log(Verbosity::info, "events: " + std::to_string(t.events.size()) + ", checks: " +
                                     std::to_string(t.report.checks.size()) + ", failures: " +
                                     std::to_string(t.report.failures().size()) + ", " + format_number(secs) + " s");
            print_summary(t.report);
            log(Verbosity::info, std::string(o.exit_code == 0 ? "PASS" : "FAIL") + " -> " + c.output_dir.string());
            return o.exit_code;
        }
        const ScenarioConfig base = load_config(batch_config);
        const auto [a, b] = parse_seed_range(seeds);
        const std::filesystem::path root = batch_out.empty() ? base.output_dir : std::filesystem::path(batch_out);
        std::vector<ScenarioConfig> configs;
        for (std::uint64_t s = a; s <= b; ++s) {
            ScenarioConfig c = base;
            c.seed = s;
            if (!batch_level.empty()) c.level = parse_check_level(batch_level);
            c.output_dir = root / ("seed_" + std::to_string(s));
            configs.push_back(std::move(c));
        }
        const BatchSummary summary = batch(configs, root, jobs);
        std::size_t failed = 0;
        for (const auto& r : summary.runs) {
            if (!r.passed) {
                ++failed;
                log(Verbosity::quiet, "FAIL " + r.label + (r.error.empty() ? "" : ": " + r.error));
            } else {
                log(Verbosity::debug, "pass " + r.label + " (" + std::to_string(r.events) + " events)");
            }
        }
        log(Verbosity::info, std::to_string(summary.runs.size() - failed) + "/" + std::to_string(summary.runs.size()) +
                                 " runs passed; summary in " + (root / "summary.json").string());
        return summary.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
