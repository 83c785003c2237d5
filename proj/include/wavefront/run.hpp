#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/flux_models.hpp"
#include "wavefront/pair_history.hpp"
#include "wavefront/pair_oracle.hpp"
#include "wavefront/report.hpp"
#include "wavefront/simulator.hpp"
#include "wavefront/verifier.hpp"
#include "wavefront/wavefield.hpp"

namespace wavefront {

enum class CheckLevel { fast, full, small_n };

inline std::string to_string(CheckLevel level) {
    switch (level) {
        case CheckLevel::fast: return "fast";
        case CheckLevel::full: return "full";
        case CheckLevel::small_n: return "small_n";
    }
    return "fast";
}

inline CheckLevel parse_check_level(const std::string& s) {
    if (s == "fast") return CheckLevel::fast;
    if (s == "full") return CheckLevel::full;
    if (s == "small_n") return CheckLevel::small_n;
    throw ContractViolation("unknown check level '" + s + "'");
}

struct RunOptions {
    CheckLevel level = CheckLevel::fast;
    std::size_t event_guard = 1'000'000;
    bool keep_states = false;
};

struct Trajectory {
    double eps = 1.0;
    double tv_w0 = 0.0;
    double tv_v0 = 0.0;
    DerivativeBounds bounds;
    FieldState initial;
    FieldState final_state;
    std::vector<Event> events;
    std::vector<FunctionalSnapshot> functionals;  // functionals[0] is the initial time
    std::vector<FieldState> states;               // after each event, if requested
    std::optional<PairOracle> oracle;
    Report report;
};

inline Trajectory simulate(const StepFunction& w0, const StepFunction& v0, const FluxSpec& spec, double eps,
                           const RunOptions& options = {}) {
    Trajectory traj;
    traj.eps = eps;
    traj.bounds = derivative_bounds(spec);
    FieldState state = initialize(w0, v0, spec, eps);
    traj.initial = state;
    traj.tv_w0 = eps * static_cast<double>(w0.total_variation());
    traj.tv_v0 = eps * static_cast<double>(v0.total_variation());
    const bool full = options.level != CheckLevel::fast;
    const bool small = options.level == CheckLevel::small_n;

    PairHistory history(state, spec, traj.bounds);
    if (small) {
        traj.oracle.emplace(state, spec, traj.bounds);
        traj.report.add(traj.oracle->check_all(state, history, 0));
    }
    if (full) {
        traj.report.add(check_enumeration(state, 0));
        traj.report.add(check_partition_separation(history, state, 0));
    }
    traj.functionals.push_back(history.snapshot(state));
    if (options.keep_states) traj.states.push_back(state);

    while (auto collision = next_collision(state)) {
        if (traj.events.size() >= options.event_guard)
            throw RunawayError("event guard of " + std::to_string(options.event_guard) + " exceeded");
        const FieldState pre = state;
        Event ev = resolve(*collision, state, spec, traj.events.size() + 1);

        if (is_interaction(ev.kind)) traj.report.add(check_wavefront_decrease(ev, pre, history, spec));
        const FunctionalSnapshot& before = traj.functionals.back();
        const FunctionalSnapshot after = history.on_event(ev, pre, state);

        traj.report.add(check_qtrans_step(ev, before.q_trans, after.q_trans));
        switch (ev.kind) {
            case EventKind::transversal:
                traj.report.add(check_transversal_speed(ev, traj.bounds));
                traj.report.add(check_transversal_increase(ev, before.q_quadratic, after.q_quadratic, traj.bounds,
                                                           traj.tv_w0));
                break;
            case EventKind::cancellation:
                traj.report.add(check_cancellation(ev, traj.bounds, traj.tv_w0));
                traj.report.add(check_quadratic_nonincreasing("cancellation_quadratic_nonincreasing", ev,
                                                              before.q_quadratic, after.q_quadratic));
                break;
            default:
                traj.report.add(check_interaction_decrease(ev, before.q_quadratic, after.q_quadratic));
                traj.report.add(check_quadratic_nonincreasing("interaction_quadratic_nonincreasing", ev,
                                                              before.q_quadratic, after.q_quadratic));
                break;
        }
        if (full) {
            traj.report.add(check_enumeration(state, ev.index));
            traj.report.add(check_partition_separation(history, state, ev.index));
        }
        if (small) {
            traj.oracle->on_event(ev, state);
            traj.report.add(traj.oracle->check_all(state, history, ev.index));
        }
        traj.functionals.push_back(after);
        traj.events.push_back(std::move(ev));
        if (options.keep_states) traj.states.push_back(state);
    }

    const RunTotals totals = run_totals(traj.events, traj.tv_w0, traj.tv_v0);
    traj.report.add(check_main_theorem(totals, traj.bounds));
    if (traj.tv_v0 == 0.0) traj.report.add(check_main_theorem_scalar(totals, traj.bounds));
    traj.report.add(check_sums(totals, traj.bounds));
    traj.report.add(check_initial_functionals(traj.functionals.front(), totals, traj.bounds));
    traj.report.add(check_quadratic_nonnegative(traj.functionals));
    traj.final_state = std::move(state);
    return traj;
}

// Full weight table of a divided pair at the end of a small run.
inline PairOracle::Table pi_full_table(const Trajectory& traj, WaveId s, WaveId s2) {
    expects(traj.oracle.has_value(), "full weight tables need a small_n run");
    return traj.oracle->pi_full_table(s, s2);
}

}  // namespace wavefront
