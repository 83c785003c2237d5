#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/flux_models.hpp"
#include "wavefront/riemann.hpp"
#include "wavefront/wavefield.hpp"

namespace wavefront {

enum class EventKind { interaction_positive, interaction_negative, cancellation, transversal };

inline std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::interaction_positive: return "interaction_positive";
        case EventKind::interaction_negative: return "interaction_negative";
        case EventKind::cancellation: return "cancellation";
        case EventKind::transversal: return "transversal";
    }
    return "unknown";
}

inline bool is_interaction(EventKind kind) {
    return kind == EventKind::interaction_positive || kind == EventKind::interaction_negative;
}

struct SpeedChange {
    WaveId id = 0;
    double before = 0.0;
    double after = 0.0;
};

struct Event {
    std::size_t index = 0;
    double time = 0.0;
    double position = 0.0;
    EventKind kind = EventKind::interaction_positive;
    double eps = 1.0;
    std::vector<WaveId> left_waves;   // waves of the left front (empty if it is a v-front)
    std::vector<WaveId> right_waves;  // waves of the right front (empty if it is a v-front)
    std::vector<WaveId> meeting;      // alive waves at (time, position) after resolution
    std::vector<WaveId> canceled;
    std::size_t v_front = kNoFront;
    GridIndex v_jump = 0;             // |v_h| in grid units
    std::vector<SpeedChange> speed_changes;

    double meeting_strength() const { return eps * static_cast<double>(meeting.size()); }
    double v_strength() const { return eps * static_cast<double>(v_jump); }
    double cancellation() const { return eps * static_cast<double>(canceled.size()); }

    // Sum over surviving waves of |speed change| times the wave strength.
    double speed_variation() const {
        double total = 0.0;
        for (const auto& c : speed_changes) total += std::abs(c.after - c.before);
        return total * eps;
    }
};

struct Collision {
    double time = 0.0;
    double position = 0.0;
    std::size_t left = 0;  // fronts[left] meets fronts[left + 1]
};

// Earliest meeting of adjacent fronts; candidates within the time tolerance of the earliest are
// clustered and the leftmost one wins. Speeds closer than the slope tolerance are equal chords up
// to rounding and never meet.
inline std::optional<Collision> next_collision(const FieldState& state) {
    std::vector<Collision> found;
    for (std::size_t k = 0; k + 1 < state.fronts.size(); ++k) {
        const Front& a = state.fronts[k];
        const Front& b = state.fronts[k + 1];
        if (!(a.speed - b.speed > kSlopeTolerance)) continue;
        const double gap = std::max(0.0, b.position - a.position);
        const double dt = gap / (a.speed - b.speed);
        found.push_back({state.time + dt, a.position + a.speed * dt, k});
    }
    if (found.empty()) return std::nullopt;
    double earliest = found.front().time;
    for (const auto& c : found) earliest = std::min(earliest, c.time);
    std::optional<Collision> best;
    for (const auto& c : found) {
        if (c.time > earliest + kTimeTolerance) continue;
        if (!best || c.position < best->position) best = c;
    }
    return best;
}

// Moves every front to time t along its straight line.
inline void advance(FieldState& state, double t) {
    const double dt = t - state.time;
    for (Front& f : state.fronts) {
        if (f.family == Family::first) {
            f.position = state.v_fronts[f.v_front].position(t);
        } else {
            f.position += f.speed * dt;
            for (WaveId id : f.waves) state.wave(id).position = f.position;
        }
    }
    state.time = t;
}

inline void require_data_in_box(const StepFunction& w0, const StepFunction& v0, const FluxSpec& spec, double eps) {
    auto check = [&](GridIndex value, bool is_w) {
        const double x = static_cast<double>(value) * eps;
        if (is_w ? !spec.box.contains_w(x) : !spec.box.contains_v(x))
            throw DomainError(std::string(is_w ? "w0" : "v0") + " leaves the flux box");
    };
    check(w0.left_value, true);
    for (const auto& j : w0.jumps) check(j.value, true);
    check(v0.left_value, false);
    for (const auto& j : v0.jumps) check(j.value, false);
}

// Initial enumeration with each jump point split into its Riemann fan.
inline FieldState initialize(const StepFunction& w0, const StepFunction& v0, const FluxSpec& spec, double eps) {
    require_hyperbolic(spec);
    require_data_in_box(w0, v0, spec, eps);
    FieldState state = initial_enumeration(w0, v0, eps);
    const auto labels = state.region_v();
    std::vector<Front> fronts;
    for (std::size_t k = 0; k < state.fronts.size(); ++k) {
        Front& f = state.fronts[k];
        if (f.family == Family::first) {
            fronts.push_back(std::move(f));
            continue;
        }
        const GridIndex v = labels[k];
        const RiemannFan fan = solve_triangular(f.left_state, v, f.right_state, v, spec, eps);
        for (Front& g : fronts_from_fan(fan, f.waves, state, f.position)) fronts.push_back(std::move(g));
    }
    state.fronts = std::move(fronts);
    return state;
}

// Resolves the collision: advances the state to its time and replaces the two fronts by the
// Riemann fan at the meeting point.
inline Event resolve(const Collision& collision, FieldState& state, const FluxSpec& spec, std::size_t index = 0) {
    expects(collision.time >= state.time - kTimeTolerance, "stale collision: state is past its time");
    expects(collision.left + 1 < state.fronts.size(), "collision refers to a missing front");
    expects(state.fronts[collision.left].speed > state.fronts[collision.left + 1].speed,
            "collision fronts are not approaching");
    advance(state, std::max(collision.time, state.time));

    const std::size_t k = collision.left;
    const Front a = state.fronts[k];
    const Front b = state.fronts[k + 1];
    const GridIndex v_here = state.region_v()[k];

    Event ev;
    ev.index = index;
    ev.time = state.time;
    ev.eps = state.eps;
    ev.left_waves = a.waves;
    ev.right_waves = b.waves;

    std::vector<Front> replacement;
    std::vector<WaveId> candidates;
    if (a.family == Family::second && b.family == Family::second) {
        ev.position = 0.5 * (a.position + b.position);
        ev.kind = a.sign() != b.sign()       ? EventKind::cancellation
                  : a.sign() > 0             ? EventKind::interaction_positive
                                             : EventKind::interaction_negative;
        candidates = a.waves;
        candidates.insert(candidates.end(), b.waves.begin(), b.waves.end());
        const GridIndex wl = a.left_state;
        const GridIndex wr = b.right_state;
        const int sign = sign_of(wr - wl);
        const GridIndex lo = std::min(wl, wr);
        const GridIndex hi = std::max(wl, wr);
        std::vector<WaveId> survivors;
        for (WaveId id : candidates) {
            WaveRecord& rec = state.wave(id);
            const GridIndex c = rec.cell();
            if (sign != 0 && rec.sign == sign && c >= lo && c < hi) {
                survivors.push_back(id);
            } else {
                ev.canceled.push_back(id);
            }
        }
        expects(static_cast<GridIndex>(survivors.size()) == hi - lo, "survivors do not fill the new jump");
        if (ev.kind != EventKind::cancellation) expects(ev.canceled.empty(), "waves died in an interaction");
        const RiemannFan fan = solve_triangular(wl, v_here, wr, v_here, spec, state.eps);
        replacement = fronts_from_fan(fan, survivors, state, ev.position);
        ev.meeting = survivors;
    } else if (a.family == Family::second && b.family == Family::first) {
        ev.kind = EventKind::transversal;
        ev.position = b.position;
        expects(b.left_state == v_here, "v-front left state disagrees with the region it enters");
        ev.v_front = b.v_front;
        ev.v_jump = std::abs(b.right_state - b.left_state);
        const RiemannFan fan = solve_triangular(a.left_state, b.left_state, a.right_state, b.right_state, spec, state.eps);
        Front moved = b;
        replacement.push_back(moved);
        for (Front& g : fronts_from_fan(fan, a.waves, state, ev.position)) replacement.push_back(std::move(g));
        ev.meeting = a.waves;
    } else {
        throw ContractViolation("collision between fronts that cannot meet");
    }

    for (WaveId id : ev.canceled) {
        WaveRecord& rec = state.wave(id);
        rec.alive = false;
        rec.position = kInfinity;
        rec.speed = kInfinity;
        rec.death_time = state.time;
    }
    for (WaveId id : ev.meeting) {
        const bool from_a = std::find(a.waves.begin(), a.waves.end(), id) != a.waves.end();
        ev.speed_changes.push_back({id, from_a ? a.speed : b.speed, state.wave(id).speed});
    }

    state.fronts.erase(state.fronts.begin() + static_cast<std::ptrdiff_t>(k),
                       state.fronts.begin() + static_cast<std::ptrdiff_t>(k) + 2);
    state.fronts.insert(state.fronts.begin() + static_cast<std::ptrdiff_t>(k), replacement.begin(), replacement.end());
    return ev;
}

}  // namespace wavefront
