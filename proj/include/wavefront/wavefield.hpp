#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/envelopes.hpp"
#include "wavefront/flux_models.hpp"
#include "wavefront/riemann.hpp"

namespace wavefront {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kNoFront = static_cast<std::size_t>(-1);

// Right-continuous step function with integer (grid) values.
struct StepFunction {
    struct Jump {
        double x = 0.0;
        GridIndex value = 0;  // value on [x, next jump)
    };

    GridIndex left_value = 0;
    std::vector<Jump> jumps;

    GridIndex at(double x) const {
        GridIndex value = left_value;
        for (const Jump& j : jumps) {
            if (j.x > x) break;
            value = j.value;
        }
        return value;
    }

    GridIndex total_variation() const {
        GridIndex tv = 0;
        GridIndex prev = left_value;
        for (const Jump& j : jumps) {
            tv += std::abs(j.value - prev);
            prev = j.value;
        }
        return tv;
    }

    GridIndex right_value() const { return jumps.empty() ? left_value : jumps.back().value; }

    bool operator==(const StepFunction& o) const {
        if (left_value != o.left_value || jumps.size() != o.jumps.size()) return false;
        for (std::size_t i = 0; i < jumps.size(); ++i)
            if (jumps[i].x != o.jumps[i].x || jumps[i].value != o.jumps[i].value) return false;
        return true;
    }
};

// Merges equal positions, drops zero jumps, sorts by position.
inline StepFunction normalized(StepFunction f) {
    std::stable_sort(f.jumps.begin(), f.jumps.end(),
                     [](const StepFunction::Jump& a, const StepFunction::Jump& b) { return a.x < b.x; });
    StepFunction out;
    out.left_value = f.left_value;
    GridIndex prev = f.left_value;
    for (const auto& j : f.jumps) {
        if (!out.jumps.empty() && out.jumps.back().x == j.x) {
            out.jumps.back().value = j.value;
        } else {
            out.jumps.push_back(j);
        }
    }
    std::vector<StepFunction::Jump> kept;
    for (const auto& j : out.jumps) {
        if (j.value != prev) kept.push_back(j);
        prev = j.value;
    }
    out.jumps = std::move(kept);
    return out;
}

struct WaveRecord {
    WaveId id = 0;
    int sign = 1;
    GridIndex right_state = 0;
    bool alive = true;
    double position = 0.0;
    double speed = 0.0;
    double death_time = kInfinity;

    // The cell of w-values the wave carries: (right_state-1, right_state] or [right_state, right_state+1).
    GridIndex cell() const { return sign > 0 ? right_state - 1 : right_state; }
};

struct VFront {
    std::size_t id = 0;
    double initial_position = 0.0;
    GridIndex left_state = 0;
    GridIndex right_state = 0;

    double position(double t) const { return initial_position - t; }
    GridIndex strength() const { return std::abs(right_state - left_state); }
};

enum class Family { first = 1, second = 2 };

// A group of items moving together. Second-family fronts carry waves; first-family fronts
// carry a v-jump and reference their VFront.
struct Front {
    Family family = Family::second;
    double position = 0.0;
    double speed = 0.0;
    GridIndex left_state = 0;   // w-states for the second family, v-states for the first
    GridIndex right_state = 0;
    std::vector<WaveId> waves;
    std::size_t v_front = kNoFront;

    bool carries_waves() const { return family == Family::second; }
    int sign() const { return sign_of(right_state - left_state); }
};

struct FieldState {
    double time = 0.0;
    double eps = 1.0;
    GridIndex w_left = 0;
    GridIndex v_left = 0;
    std::vector<WaveRecord> waves;  // waves[id - 1]
    std::vector<VFront> v_fronts;
    std::vector<Front> fronts;      // left to right, both families

    const WaveRecord& wave(WaveId id) const {
        expects(id >= 1 && id <= waves.size(), "unknown wave id");
        return waves[id - 1];
    }
    WaveRecord& wave(WaveId id) {
        expects(id >= 1 && id <= waves.size(), "unknown wave id");
        return waves[id - 1];
    }

    std::vector<WaveId> alive_waves() const {
        std::vector<WaveId> ids;
        for (const auto& w : waves)
            if (w.alive) ids.push_back(w.id);
        return ids;
    }

    std::size_t alive_count() const {
        return static_cast<std::size_t>(std::count_if(waves.begin(), waves.end(), [](const WaveRecord& w) { return w.alive; }));
    }

    double total_variation() const { return eps * static_cast<double>(alive_count()); }

    // v-state on the region each front moves in (right of every first-family front before it).
    std::vector<GridIndex> region_v() const {
        std::vector<GridIndex> out(fronts.size());
        GridIndex v = v_left;
        for (std::size_t k = 0; k < fronts.size(); ++k) {
            if (fronts[k].family == Family::first) v = fronts[k].right_state;
            out[k] = v;
        }
        return out;
    }

    // Front index of every alive wave.
    std::unordered_map<WaveId, std::size_t> front_of_wave() const {
        std::unordered_map<WaveId, std::size_t> out;
        for (std::size_t k = 0; k < fronts.size(); ++k)
            for (WaveId id : fronts[k].waves) out[id] = k;
        return out;
    }

    // v at each alive wave, keyed by id.
    std::unordered_map<WaveId, GridIndex> wave_v() const {
        std::unordered_map<WaveId, GridIndex> out;
        const auto labels = region_v();
        for (std::size_t k = 0; k < fronts.size(); ++k)
            for (WaveId id : fronts[k].waves) out[id] = labels[k];
        return out;
    }
};

namespace detail {

inline void require_on_grid(const StepFunction& f, const char* what) {
    for (std::size_t i = 1; i < f.jumps.size(); ++i)
        expects(f.jumps[i - 1].x < f.jumps[i].x, std::string(what) + ": jump positions must be strictly increasing");
    for (const auto& j : f.jumps) expects(std::isfinite(j.x), std::string(what) + ": jump positions must be finite");
}

}  // namespace detail

// Grid-valued data to a step function; throws if any value is off eps*Z.
inline GridIndex to_grid(double value, double eps) {
    const double scaled = value / eps;
    const double rounded = std::round(scaled);
    expects(std::abs(scaled - rounded) <= 1e-9 * std::max(1.0, std::abs(scaled)), "value is not on the grid eps*Z");
    return static_cast<GridIndex>(rounded);
}

// Waves 1..TV(w0)/eps with their initial positions and right states. Each jump point of w0 holds
// one second-family front; speeds are left at zero (see assign_speeds).
inline FieldState initial_enumeration(const StepFunction& w0, const StepFunction& v0, double eps) {
    expects(eps > 0.0, "grid step must be positive");
    detail::require_on_grid(w0, "w0");
    detail::require_on_grid(v0, "v0");
    FieldState state;
    state.eps = eps;
    state.w_left = w0.left_value;
    state.v_left = v0.left_value;

    std::vector<double> points;
    for (const auto& j : w0.jumps) points.push_back(j.x);
    for (const auto& j : v0.jumps) points.push_back(j.x);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    GridIndex w = w0.left_value;
    GridIndex v = v0.left_value;
    std::size_t wi = 0;
    std::size_t vi = 0;
    for (double x : points) {
        if (vi < v0.jumps.size() && v0.jumps[vi].x == x) {
            const GridIndex next = v0.jumps[vi++].value;
            if (next != v) {
                VFront vf{state.v_fronts.size(), x, v, next};
                Front f;
                f.family = Family::first;
                f.position = x;
                f.speed = -1.0;
                f.left_state = v;
                f.right_state = next;
                f.v_front = vf.id;
                state.v_fronts.push_back(vf);
                state.fronts.push_back(std::move(f));
                v = next;
            }
        }
        if (wi < w0.jumps.size() && w0.jumps[wi].x == x) {
            const GridIndex next = w0.jumps[wi++].value;
            if (next != w) {
                Front f;
                f.family = Family::second;
                f.position = x;
                f.left_state = w;
                f.right_state = next;
                const int sign = sign_of(next - w);
                for (GridIndex k = 1; k <= std::abs(next - w); ++k) {
                    WaveRecord rec;
                    rec.id = static_cast<WaveId>(state.waves.size() + 1);
                    rec.sign = sign;
                    rec.right_state = w + sign * k;
                    rec.position = x;
                    state.waves.push_back(rec);
                    f.waves.push_back(rec.id);
                }
                state.fronts.push_back(std::move(f));
                w = next;
            }
        }
    }
    return state;
}

// Splits the Riemann fan of a second-family jump among the given waves (matched by cell).
// Sets each wave's position and speed and returns the fronts in x-order.
inline std::vector<Front> fronts_from_fan(const RiemannFan& fan, const std::vector<WaveId>& candidates,
                                          FieldState& state, double position) {
    std::map<GridIndex, WaveId> by_cell;
    for (WaveId id : candidates) by_cell[state.wave(id).cell()] = id;
    std::vector<Front> out;
    for (const RiemannFront& rf : fan.fronts) {
        if (rf.family != 2) continue;
        Front f;
        f.family = Family::second;
        f.position = position;
        f.speed = rf.speed;
        f.left_state = rf.w_left;
        f.right_state = rf.w_right;
        for (GridIndex c : rf.cells) {
            auto it = by_cell.find(c);
            expects(it != by_cell.end(), "Riemann fan cell has no wave");
            WaveRecord& rec = state.wave(it->second);
            expects(rec.sign == rf.sign(), "wave sign disagrees with its front");
            rec.position = position;
            rec.speed = rf.speed;
            f.waves.push_back(rec.id);
        }
        out.push_back(std::move(f));
    }
    return out;
}

// Speeds of the waves of second-family front k, from the Riemann problem across it with the flux
// at the local v.
inline std::vector<double> assign_speeds(const FieldState& state, std::size_t k, const FluxSpec& spec) {
    expects(k < state.fronts.size() && state.fronts[k].carries_waves(), "front index must name a wave front");
    const Front& front = state.fronts[k];
    for (WaveId id : front.waves)
        expects(state.wave(id).sign == front.sign(), "mixed-sign front");
    const GridIndex v = state.region_v()[k];
    const RiemannFan fan = solve_triangular(front.left_state, v, front.right_state, v, spec, state.eps);
    std::map<GridIndex, double> speed_of_cell;
    for (const auto& rf : fan.fronts)
        for (GridIndex c : rf.cells) speed_of_cell[c] = rf.speed;
    std::vector<double> speeds;
    for (WaveId id : front.waves) speeds.push_back(speed_of_cell.at(state.wave(id).cell()));
    return speeds;
}

struct EnumerationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

inline EnumerationReport validate_enumeration(const FieldState& state) {
    EnumerationReport report;
    auto flag = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    for (std::size_t i = 0; i < state.waves.size(); ++i)
        if (state.waves[i].id != i + 1) flag("wave table out of order at slot " + std::to_string(i));

    std::vector<int> seen(state.waves.size() + 1, 0);
    GridIndex w = state.w_left;
    GridIndex v = state.v_left;
    WaveId last_id = 0;
    double last_position = -kInfinity;
    for (std::size_t k = 0; k < state.fronts.size(); ++k) {
        const Front& f = state.fronts[k];
        const std::string where = "front " + std::to_string(k);
        if (f.position < last_position - kPositionTolerance) flag(where + ": positions out of order");
        last_position = std::max(last_position, f.position);
        if (f.family == Family::first) {
            if (f.left_state != v) flag(where + ": v-states do not telescope");
            v = f.right_state;
            if (f.v_front >= state.v_fronts.size()) {
                flag(where + ": unknown v-front");
            } else if (std::abs(f.position - state.v_fronts[f.v_front].position(state.time)) > kPositionTolerance) {
                flag(where + ": v-front off its characteristic line");
            }
            if (!f.waves.empty()) flag(where + ": first-family front carries waves");
            continue;
        }
        if (f.left_state != w) flag(where + ": w-states do not telescope");
        w = f.right_state;
        const int sign = f.sign();
        if (sign == 0) flag(where + ": zero-strength wave front");
        if (static_cast<GridIndex>(f.waves.size()) != std::abs(f.right_state - f.left_state))
            flag(where + ": wave count differs from jump size");
        GridIndex expected = f.left_state;
        for (WaveId id : f.waves) {
            if (id < 1 || id > state.waves.size()) {
                flag(where + ": unknown wave id");
                continue;
            }
            const WaveRecord& rec = state.wave(id);
            ++seen[id];
            expected += sign;
            if (id <= last_id) flag(where + ": wave ids not increasing in x");
            last_id = id;
            if (!rec.alive) flag(where + ": dead wave " + std::to_string(id) + " in a front");
            if (rec.sign != sign) flag(where + ": wave " + std::to_string(id) + " has the wrong sign");
            if (rec.right_state != expected)
                flag(where + ": wave " + std::to_string(id) + " right state breaks the stack");
            if (rec.position != f.position || rec.speed != f.speed)
                flag(where + ": wave " + std::to_string(id) + " not moving with its front");
        }
    }
    for (const auto& rec : state.waves) {
        if (rec.alive && seen[rec.id] != 1) flag("alive wave " + std::to_string(rec.id) + " not in exactly one front");
        if (!rec.alive && seen[rec.id] != 0) flag("dead wave " + std::to_string(rec.id) + " still in a front");
        if (rec.alive != (rec.death_time == kInfinity)) flag("wave " + std::to_string(rec.id) + " death time inconsistent");
        if (!rec.alive && rec.death_time > state.time + kTimeTolerance)
            flag("wave " + std::to_string(rec.id) + " dies in the future");
    }
    return report;
}

// w(x) = w(-inf) + eps-atoms of the alive waves, as a grid step function.
inline StepFunction reconstruct_profile(const FieldState& state) {
    StepFunction f;
    f.left_value = state.w_left;
    std::vector<std::pair<double, int>> atoms;
    for (const auto& rec : state.waves)
        if (rec.alive) atoms.emplace_back(rec.position, rec.sign);
    std::stable_sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    GridIndex value = state.w_left;
    for (const auto& [x, s] : atoms) {
        value += s;
        f.jumps.push_back({x, value});
    }
    return normalized(std::move(f));
}

// Profile read off the front states, for comparison with reconstruct_profile.
inline StepFunction front_profile(const FieldState& state) {
    StepFunction f;
    f.left_value = state.w_left;
    std::vector<std::pair<double, GridIndex>> steps;
    for (const auto& fr : state.fronts)
        if (fr.carries_waves()) steps.emplace_back(fr.position, fr.right_state - fr.left_state);
    std::stable_sort(steps.begin(), steps.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    GridIndex value = state.w_left;
    for (const auto& [x, d] : steps) {
        value += d;
        f.jumps.push_back({x, value});
    }
    return normalized(std::move(f));
}

inline bool push_forward_holds(const FieldState& state) {
    return reconstruct_profile(state) == front_profile(state);
}

// Maximal runs of alive waves (in id order) with a common sign.
inline std::vector<std::vector<WaveId>> maximal_blocks(const FieldState& state) {
    std::vector<std::vector<WaveId>> blocks;
    int sign = 0;
    for (const auto& rec : state.waves) {
        if (!rec.alive) continue;
        if (blocks.empty() || rec.sign != sign) blocks.emplace_back();
        blocks.back().push_back(rec.id);
        sign = rec.sign;
    }
    return blocks;
}

}  // namespace wavefront
