#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wavefront/core.hpp"
#include "wavefront/flux_models.hpp"
#include "wavefront/report.hpp"
#include "wavefront/run.hpp"
#include "wavefront/simulator.hpp"
#include "wavefront/wavefield.hpp"

namespace wavefront {

using json = nlohmann::json;

// Random profile: `jumps` random levels, then a return to 0 if needed.
struct RandomProfile {
    int jumps = 0;
    double amplitude = 1.0;
    std::optional<GridIndex> max_variation;  // in grid units
};

struct ProfileSpec {
    std::optional<StepFunction> explicit_data;
    RandomProfile random;
};

struct FluxChoice {
    std::string name = "quadratic_coupled";
    json params = json::object();
};

struct ScenarioConfig {
    FluxChoice flux;
    double eps = 0.05;
    std::uint64_t seed = 0;
    ProfileSpec w0;
    ProfileSpec v0;
    CheckLevel level = CheckLevel::fast;
    std::filesystem::path output_dir = "out";
    std::size_t event_guard = 1'000'000;
    bool snapshots = false;
    json echo = json::object();
};

inline Box parse_box(const json& j) {
    Box box;
    if (j.is_null()) return box;
    box.w_min = j.value("w_min", box.w_min);
    box.w_max = j.value("w_max", box.w_max);
    box.v_min = j.value("v_min", box.v_min);
    box.v_max = j.value("v_max", box.v_max);
    return box;
}

inline FluxSpec make_flux(const FluxChoice& choice) {
    const json& p = choice.params;
    const Box box = parse_box(p.contains("box") ? p.at("box") : json());
    if (choice.name == "quadratic_coupled") return quadratic_coupled(p.value("c", 0.1), box);
    if (choice.name == "quartic") return quartic(p.value("c", 0.1), box);
    if (choice.name == "custom_poly") {
        expects(p.contains("coefficients"), "custom_poly needs 'coefficients' (rows in powers of w, columns in v)");
        return custom_poly(p.at("coefficients").get<std::vector<std::vector<double>>>(), box);
    }
    throw ContractViolation("unknown flux '" + choice.name + "'");
}

inline ProfileSpec parse_profile(const json& j, double eps) {
    ProfileSpec spec;
    if (j.is_null()) {
        spec.explicit_data = StepFunction{};
        return spec;
    }
    if (j.contains("random")) {
        const json& r = j.at("random");
        spec.random.jumps = r.value("jumps", 1);
        spec.random.amplitude = r.value("amplitude", 1.0);
        if (r.contains("max_variation")) spec.random.max_variation = r.at("max_variation").get<GridIndex>();
        return spec;
    }
    StepFunction f;
    f.left_value = to_grid(j.value("left", 0.0), eps);
    for (const auto& jump : j.value("jumps", json::array())) {
        expects(jump.is_array() && jump.size() == 2, "explicit jumps are [x, value] pairs");
        f.jumps.push_back({jump[0].get<double>(), to_grid(jump[1].get<double>(), eps)});
    }
    spec.explicit_data = std::move(f);
    return spec;
}

inline ScenarioConfig parse_config(const json& j) {
    ScenarioConfig c;
    c.echo = j;
    c.eps = j.value("eps", c.eps);
    expects(c.eps > 0.0, "eps must be positive");
    if (j.contains("flux")) {
        const json& f = j.at("flux");
        c.flux.name = f.value("name", c.flux.name);
        c.flux.params = f.value("params", json::object());
        if (f.contains("box")) c.flux.params["box"] = f.at("box");
    }
    c.seed = j.value("seed", std::uint64_t{0});
    c.w0 = parse_profile(j.value("w0", json()), c.eps);
    c.v0 = parse_profile(j.value("v0", json()), c.eps);
    c.level = parse_check_level(j.value("check_level", std::string("fast")));
    c.output_dir = j.value("output_dir", std::string("out"));
    c.event_guard = j.value("event_guard", c.event_guard);
    c.snapshots = j.value("snapshots", false);
    return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    return parse_config(json::parse(in));
}

namespace detail {

// Levels allowed by the amplitude bound and the box, in grid units.
inline std::pair<GridIndex, GridIndex> level_range(double amplitude, double lo, double hi, double eps) {
    const GridIndex kmin = static_cast<GridIndex>(std::ceil(std::max(-amplitude, lo) / eps - 1e-9));
    const GridIndex kmax = static_cast<GridIndex>(std::floor(std::min(amplitude, hi) / eps + 1e-9));
    return {kmin, kmax};
}

inline StepFunction random_profile(const RandomProfile& r, double lo, double hi, double eps, std::mt19937_64& rng,
                                   std::set<double>& used_positions) {
    StepFunction f;
    if (r.jumps <= 0) return f;
    const auto [kmin, kmax] = level_range(r.amplitude, lo, hi, eps);
    if (kmin > 0 || kmax < 0 || kmin == kmax) throw DomainError("amplitude and box leave no nonzero level");
    GridIndex budget = r.max_variation.value_or(std::numeric_limits<GridIndex>::max() / 4);
    if (budget < 2) throw DomainError("variation budget too small for a jump and its return");

    std::uniform_real_distribution<double> where(0.0, 10.0);
    std::vector<double> xs;
    while (xs.size() < static_cast<std::size_t>(r.jumps) + 1) {
        const double x = where(rng);
        if (x > 0.0 && used_positions.insert(x).second) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());

    GridIndex level = 0;
    std::size_t used = 0;
    for (int i = 0; i < r.jumps; ++i) {
        std::vector<GridIndex> options;
        for (GridIndex k = kmin; k <= kmax; ++k)
            if (k != level && std::abs(k - level) + std::abs(k) <= budget) options.push_back(k);
        if (options.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        const GridIndex next = options[pick(rng)];
        budget -= std::abs(next - level);
        level = next;
        f.jumps.push_back({xs[used++], level});
    }
    if (level != 0) f.jumps.push_back({xs[used], 0});
    return f;
}

}  // namespace detail

struct RandomData {
    RandomProfile w;
    RandomProfile v;
};

// Compactly supported data on [0, 10] with grid values inside the box; one stream per seed.
inline std::pair<StepFunction, StepFunction> generate_initial_data(const RandomData& spec, std::uint64_t seed,
                                                                   double eps, const Box& box) {
    expects(spec.w.jumps >= 1 || spec.v.jumps >= 1, "random data needs at least one jump");
    std::mt19937_64 rng(seed);
    std::set<double> used;
    StepFunction w0 = detail::random_profile(spec.w, box.w_min, box.w_max, eps, rng, used);
    StepFunction v0 = detail::random_profile(spec.v, box.v_min, box.v_max, eps, rng, used);
    return {std::move(w0), std::move(v0)};
}

inline std::pair<StepFunction, StepFunction> initial_data(const ScenarioConfig& c, const FluxSpec& flux) {
    RandomData r{c.w0.random, c.v0.random};
    if (c.w0.explicit_data) r.w.jumps = 0;
    if (c.v0.explicit_data) r.v.jumps = 0;
    std::pair<StepFunction, StepFunction> data;
    if (r.w.jumps > 0 || r.v.jumps > 0) data = generate_initial_data(r, c.seed, c.eps, flux.box);
    if (c.w0.explicit_data) data.first = *c.w0.explicit_data;
    if (c.v0.explicit_data) data.second = *c.v0.explicit_data;
    return data;
}

inline std::string format_number(double x) {
    if (x == kInfinity) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string events_csv(const Trajectory& t) {
    std::ostringstream out;
    out << "j,t,x,kind,meeting_strength,v_strength,cancellation\n";
    for (const auto& ev : t.events) {
        out << ev.index << ',' << format_number(ev.time) << ',' << format_number(ev.position) << ','
            << to_string(ev.kind) << ',' << format_number(ev.meeting_strength()) << ','
            << format_number(ev.kind == EventKind::transversal ? ev.v_strength() : 0.0) << ','
            << format_number(ev.kind == EventKind::cancellation ? ev.cancellation() : 0.0) << '\n';
    }
    return out.str();
}

inline std::string functionals_csv(const Trajectory& t) {
    std::ostringstream out;
    out << "j,t,tv_w,q_trans,q_quadratic,speed_variation\n";
    for (std::size_t j = 0; j < t.functionals.size(); ++j) {
        const auto& s = t.functionals[j];
        out << j << ',' << format_number(s.time) << ',' << format_number(s.tv_w) << ',' << format_number(s.q_trans)
            << ',' << format_number(s.q_quadratic) << ',' << format_number(s.speed_variation) << '\n';
    }
    return out.str();
}

inline json to_json(const FieldState& state) {
    json waves = json::array();
    for (const auto& w : state.waves) {
        json jw = {{"id", w.id}, {"sign", w.sign}, {"right_state", w.right_state}, {"alive", w.alive}};
        jw["position"] = w.alive ? json(w.position) : json("inf");
        jw["speed"] = w.alive ? json(w.speed) : json("inf");
        if (!w.alive) jw["death_time"] = w.death_time;
        waves.push_back(std::move(jw));
    }
    json vfronts = json::array();
    for (const auto& v : state.v_fronts)
        vfronts.push_back({{"id", v.id},
                           {"position", v.position(state.time)},
                           {"left_state", v.left_state},
                           {"right_state", v.right_state}});
    return {{"time", state.time}, {"eps", state.eps}, {"waves", waves}, {"v_fronts", vfronts}};
}

inline json to_json(const Event& ev) {
    json changes = json::array();
    for (const auto& c : ev.speed_changes) changes.push_back({{"id", c.id}, {"before", c.before}, {"after", c.after}});
    return {{"j", ev.index},          {"t", ev.time},          {"x", ev.position},
            {"kind", to_string(ev.kind)}, {"left_waves", ev.left_waves}, {"right_waves", ev.right_waves},
            {"meeting", ev.meeting},  {"canceled", ev.canceled}, {"v_jump", ev.v_jump},
            {"speed_changes", changes}};
}

inline json summary_json(const std::map<std::string, CheckSummary>& summary) {
    json out = json::object();
    for (const auto& [name, s] : summary)
        out[name] = {{"count", s.count}, {"failures", s.failures}, {"min_slack", s.min_slack}};
    return out;
}

inline json report_json(const Trajectory& t, const json& echo) {
    json checks = json::array();
    for (const auto& c : t.report.checks) {
        json jc = {{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"pass", c.pass}};
        jc["event"] = c.global() ? json(nullptr) : json(c.event);
        checks.push_back(std::move(jc));
    }
    json failed_events = json::array();
    std::set<std::size_t> seen;
    for (const auto& c : t.report.failures())
        if (!c.global() && c.event >= 1 && seen.insert(c.event).second) failed_events.push_back(to_json(t.events[c.event - 1]));
    return {{"passed", t.report.passed()},  {"events", t.events.size()},
            {"summary", summary_json(t.report.summary())}, {"checks", checks},
            {"failed_events", failed_events}, {"config", echo}};
}

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

// Writes into a sibling temporary directory, then renames it into place.
template <class Fill>
void publish_directory(const std::filesystem::path& dir, Fill&& fill) {
    namespace fs = std::filesystem;
    const fs::path target = fs::absolute(dir);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path staging = target.parent_path() / (target.filename().string() + ".partial");
    fs::remove_all(staging);
    fs::create_directories(staging);
    fill(staging);
    fs::remove_all(target);
    fs::rename(staging, target);
}

}  // namespace detail

struct ScenarioOutcome {
    int exit_code = 0;
    Trajectory trajectory;
};

inline Trajectory run_config(const ScenarioConfig& c) {
    const FluxSpec flux = make_flux(c.flux);
    const auto [w0, v0] = initial_data(c, flux);
    RunOptions opts;
    opts.level = c.level;
    opts.event_guard = c.event_guard;
    opts.keep_states = c.snapshots;
    return simulate(w0, v0, flux, c.eps, opts);
}

inline ScenarioOutcome run_scenario(const ScenarioConfig& c) {
    ScenarioOutcome outcome;
    outcome.trajectory = run_config(c);
    const Trajectory& t = outcome.trajectory;
    json echo = c.echo;
    echo["seed"] = c.seed;
    echo["check_level"] = to_string(c.level);
    detail::publish_directory(c.output_dir, [&](const std::filesystem::path& dir) {
        detail::write_text(dir / "events.csv", events_csv(t));
        detail::write_text(dir / "functionals.csv", functionals_csv(t));
        detail::write_text(dir / "report.json", report_json(t, echo).dump(2) + "\n");
        if (c.snapshots) {
            json snaps = json::array();
            snaps.push_back(to_json(t.initial));
            for (std::size_t k = 1; k < t.states.size(); ++k) snaps.push_back(to_json(t.states[k]));
            detail::write_text(dir / "snapshots.json", snaps.dump(1) + "\n");
        }
    });
    outcome.exit_code = t.report.passed() ? 0 : 1;
    return outcome;
}

struct BatchRun {
    std::string label;
    CheckLevel level = CheckLevel::fast;
    bool passed = false;
    std::size_t events = 0;
    std::string error;
};

struct BatchSummary {
    std::vector<BatchRun> runs;
    std::map<std::string, std::map<std::string, CheckSummary>> per_level;

    bool passed() const {
        return std::all_of(runs.begin(), runs.end(), [](const BatchRun& r) { return r.passed; });
    }
};

inline void merge_summary(std::map<std::string, CheckSummary>& into, const std::map<std::string, CheckSummary>& from) {
    for (const auto& [name, s] : from) {
        CheckSummary& t = into[name];
        t.count += s.count;
        t.failures += s.failures;
        t.min_slack = std::min(t.min_slack, s.min_slack);
    }
}

// Runs independent scenarios in parallel and aggregates min slack per check and check level.
inline BatchSummary batch(const std::vector<ScenarioConfig>& configs, const std::filesystem::path& summary_dir,
                          unsigned jobs = 0) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    struct Result {
        BatchRun run;
        std::map<std::string, CheckSummary> summary;
    };
    std::vector<Result> results(configs.size());
    std::size_t next = 0;
    while (next < configs.size()) {
        std::vector<std::future<Result>> wave;
        for (unsigned k = 0; k < jobs && next < configs.size(); ++k, ++next) {
            wave.push_back(std::async(std::launch::async, [&c = configs[next]]() {
                Result r;
                r.run.label = c.output_dir.filename().string();
                r.run.level = c.level;
                try {
                    const ScenarioOutcome o = run_scenario(c);
                    r.run.passed = o.exit_code == 0;
                    r.run.events = o.trajectory.events.size();
                    r.summary = o.trajectory.report.summary();
                } catch (const std::exception& e) {
                    r.run.passed = false;
                    r.run.error = e.what();
                }
                return r;
            }));
        }
        const std::size_t base = next - wave.size();
        for (std::size_t k = 0; k < wave.size(); ++k) results[base + k] = wave[k].get();
    }
    BatchSummary out;
    for (auto& r : results) {
        merge_summary(out.per_level[to_string(r.run.level)], r.summary);
        out.runs.push_back(std::move(r.run));
    }
    json runs = json::array();
    for (const auto& r : out.runs) {
        json jr = {{"run", r.label}, {"check_level", to_string(r.level)}, {"passed", r.passed}, {"events", r.events}};
        if (!r.error.empty()) jr["error"] = r.error;
        runs.push_back(std::move(jr));
    }
    json levels = json::object();
    for (const auto& [level, s] : out.per_level) levels[level] = summary_json(s);
    std::filesystem::create_directories(summary_dir);
    detail::write_text(summary_dir / "summary.json",
                       json{{"passed", out.passed()}, {"runs", runs}, {"per_level", levels}}.dump(2) + "\n");
    return out;
}

// Parses "A..B" (inclusive).
inline std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
    const auto dots = s.find("..");
    expects(dots != std::string::npos, "seed range must look like A..B");
    const std::uint64_t a = std::stoull(s.substr(0, dots));
    const std::uint64_t b = std::stoull(s.substr(dots + 2));
    expects(a <= b, "seed range must have A <= B");
    return {a, b};
}

}  // namespace wavefront
