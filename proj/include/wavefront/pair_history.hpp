#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/effective_flux.hpp"
#include "wavefront/flux_models.hpp"
#include "wavefront/simulator.hpp"
#include "wavefront/wavefield.hpp"

namespace wavefront {

enum class PairStatus { never_interacted, joined, divided };

using WavePair = std::pair<WaveId, WaveId>;  // first < second

// Interval of waves of a past meeting (restricted to the alive waves) and its partition into
// classes that have never been divided since.
struct PartitionRecord {
    std::size_t key = 0;
    std::size_t owner_event = 0;  // 0 for meetings at the initial time
    double time = 0.0;
    double position = 0.0;
    std::vector<WaveId> interval;
    std::vector<std::vector<WaveId>> classes;
    std::size_t users = 0;

    std::size_t class_of(WaveId id) const {
        for (std::size_t c = 0; c < classes.size(); ++c)
            if (std::binary_search(classes[c].begin(), classes[c].end(), id)) return c;
        throw ContractViolation("wave not in the partitioned interval");
    }
};

struct PairState {
    PairStatus status = PairStatus::never_interacted;
    double last_meet_time = 0.0;
    double last_meet_position = 0.0;
    std::size_t last_meet_event = 0;
    std::optional<std::size_t> partition_key;
    double pi = 0.0;
    double weight = 0.0;
};

struct FunctionalSnapshot {
    double time = 0.0;
    double tv_w = 0.0;
    double q_trans = 0.0;
    double q_quadratic = 0.0;
    double speed_variation = 0.0;
};

// Glimm transversal potential: sum over v-fronts of |v_h| times the strength of the waves on
// their left (left in the front order, which breaks position ties the way the solution does).
inline double Q_trans(const FieldState& state) {
    double total = 0.0;
    std::size_t waves_left = 0;
    for (const Front& f : state.fronts) {
        if (f.family == Family::second) {
            waves_left += f.waves.size();
        } else {
            total += static_cast<double>(std::abs(f.right_state - f.left_state)) * state.eps *
                     static_cast<double>(waves_left) * state.eps;
        }
    }
    return total;
}

inline double cancellation_amount(const Event& ev) {
    expects(ev.kind == EventKind::cancellation, "cancellation amount of a non-cancellation event");
    return ev.cancellation();
}

// Total strength of the classes from the class of p to the class of p' that lie inside the set
// of waves meeting at a transversal event.
inline double M_value(const PartitionRecord& rec, const std::unordered_set<WaveId>& meeting, WaveId p, WaveId p2,
                      double eps) {
    expects(std::binary_search(rec.interval.begin(), rec.interval.end(), p) &&
                std::binary_search(rec.interval.begin(), rec.interval.end(), p2),
            "M needs both waves inside the partitioned interval");
    std::size_t a = rec.class_of(p);
    std::size_t b = rec.class_of(p2);
    if (a > b) std::swap(a, b);
    std::size_t count = 0;
    for (std::size_t c = a; c <= b; ++c) {
        const auto& cls = rec.classes[c];
        if (std::all_of(cls.begin(), cls.end(), [&](WaveId id) { return meeting.count(id) > 0; })) count += cls.size();
    }
    return eps * static_cast<double>(count);
}

// Groups the given alive waves by the front holding them (fronts in x-order, ids sorted).
inline std::vector<std::vector<WaveId>> group_by_front(const FieldState& state, const std::vector<WaveId>& ids) {
    const auto front_of = state.front_of_wave();
    std::map<std::size_t, std::vector<WaveId>> groups;
    for (WaveId id : ids) groups[front_of.at(id)].push_back(id);
    std::vector<std::vector<WaveId>> out;
    for (auto& [k, g] : groups) {
        std::sort(g.begin(), g.end());
        out.push_back(std::move(g));
    }
    return out;
}

// Restricts a class list to alive waves and splits every class where the Riemann problem over
// it, with the current effective flux, divides its members.
inline std::vector<std::vector<WaveId>> refine_classes(const std::vector<std::vector<WaveId>>& classes,
                                                      const FieldState& state, const EffectiveFluxTable& table) {
    std::vector<std::vector<WaveId>> out;
    for (const auto& cls : classes) {
        std::vector<WaveId> alive;
        for (WaveId id : cls)
            if (state.wave(id).alive) alive.push_back(id);
        if (alive.empty()) continue;
        for (auto& piece : table.entropic_classes(alive)) out.push_back(std::move(piece));
    }
    return out;
}

class PairHistory {
public:
    PairHistory(const FieldState& initial, const FluxSpec& spec, const DerivativeBounds& bounds)
        : spec_(&spec), bounds_(bounds), eps_(initial.eps) {
        std::vector<std::vector<WaveId>> at_point;
        double x = 0.0;
        auto flush = [&]() {
            std::vector<WaveId> meeting;
            for (const auto& g : at_point) meeting.insert(meeting.end(), g.begin(), g.end());
            if (!meeting.empty()) record_meeting(meeting, at_point, 0.0, x, 0);
            at_point.clear();
        };
        for (const Front& f : initial.fronts) {
            if (!f.carries_waves()) continue;
            if (!at_point.empty() && f.position != x) flush();
            x = f.position;
            at_point.push_back(f.waves);
        }
        flush();
        recompute(initial);
    }

    // Advances all pair data from t_{j-1} to t_j.
    FunctionalSnapshot on_event(const Event& ev, const FieldState& pre, const FieldState& post) {
        expects(pre.alive_count() >= post.alive_count(), "alive set grew across an event");
        expects(post.time >= time_ - kTimeTolerance, "event older than the history");
        for (WaveId id : ev.meeting) expects(post.wave(id).alive, "meeting wave is dead");

        if (ev.kind == EventKind::transversal) {
            const std::unordered_set<WaveId> meeting(ev.meeting.begin(), ev.meeting.end());
            const double factor = 2.0 * bounds_.norm_d3_wwv * ev.v_strength();
            for (auto& [key, ps] : pairs_) {
                if (ps.status != PairStatus::divided) continue;
                ps.pi += factor * M_value(records_.at(*ps.partition_key), meeting, key.first, key.second, eps_);
            }
        }

        const EffectiveFluxTable table(post, *spec_);
        for (auto& [key, rec] : records_) {
            std::vector<WaveId> interval;
            for (WaveId id : rec.interval)
                if (post.wave(id).alive) interval.push_back(id);
            rec.interval = std::move(interval);
            rec.classes = refine_classes(rec.classes, post, table);
        }

        for (auto it = pairs_.begin(); it != pairs_.end();) {
            if (!post.wave(it->first.first).alive || !post.wave(it->first.second).alive) {
                release(it->second);
                it = pairs_.erase(it);
            } else {
                ++it;
            }
        }

        std::vector<WaveId> meeting = ev.meeting;
        std::sort(meeting.begin(), meeting.end());
        if (!meeting.empty()) record_meeting(meeting, group_by_front(post, meeting), ev.time, ev.position, ev.index);
        collect_garbage();
        time_ = post.time;
        recompute(post);
        FunctionalSnapshot snap = snapshot(post);
        snap.speed_variation = ev.speed_variation();
        return snap;
    }

    PairStatus status(WaveId s, WaveId s2) const {
        const PairState* ps = pair(s, s2);
        return ps ? ps->status : PairStatus::never_interacted;
    }

    const PairState* pair(WaveId s, WaveId s2) const {
        auto it = pairs_.find(ordered(s, s2));
        return it == pairs_.end() ? nullptr : &it->second;
    }

    double pi(WaveId s, WaveId s2) const {
        const PairState* ps = pair(s, s2);
        return ps ? ps->pi : 0.0;
    }

    double weight(WaveId s, WaveId s2) const {
        const PairState* ps = pair(s, s2);
        return ps ? ps->weight : bounds_.norm_d2_ww;
    }

    const PartitionRecord* partition(WaveId s, WaveId s2) const {
        const PairState* ps = pair(s, s2);
        if (!ps || !ps->partition_key) return nullptr;
        return &records_.at(*ps->partition_key);
    }

    double Q_quadratic() const { return q_quadratic_; }
    const std::map<WavePair, PairState>& pairs() const { return pairs_; }
    const std::map<std::size_t, PartitionRecord>& records() const { return records_; }
    const DerivativeBounds& bounds() const { return bounds_; }

    FunctionalSnapshot snapshot(const FieldState& state) const {
        FunctionalSnapshot snap;
        snap.time = state.time;
        snap.tv_w = state.total_variation();
        snap.q_trans = Q_trans(state);
        snap.q_quadratic = q_quadratic_;
        return snap;
    }

private:
    static WavePair ordered(WaveId a, WaveId b) { return a < b ? WavePair{a, b} : WavePair{b, a}; }

    void release(PairState& ps) {
        if (!ps.partition_key) return;
        auto it = records_.find(*ps.partition_key);
        if (it != records_.end() && it->second.users > 0) --it->second.users;
        ps.partition_key.reset();
    }

    void collect_garbage() {
        for (auto it = records_.begin(); it != records_.end();) {
            if (it->second.users == 0)
                it = records_.erase(it);
            else
                ++it;
        }
    }

    // All waves in `meeting` share the position x at time t; `groups` are the fronts they leave in.
    void record_meeting(const std::vector<WaveId>& meeting, const std::vector<std::vector<WaveId>>& groups, double t,
                        double x, std::size_t event) {
        std::unordered_map<WaveId, std::size_t> group_of;
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (WaveId id : groups[g]) group_of[id] = g;
        std::optional<std::size_t> fresh;
        for (std::size_t i = 0; i < meeting.size(); ++i) {
            for (std::size_t j = i + 1; j < meeting.size(); ++j) {
                const WavePair key = ordered(meeting[i], meeting[j]);
                PairState& ps = pairs_[key];
                const bool joined = group_of.at(key.first) == group_of.at(key.second);
                expects(joined || ps.status != PairStatus::divided,
                        "pair divided before and after sharing a position");
                release(ps);
                ps.last_meet_time = t;
                ps.last_meet_position = x;
                ps.last_meet_event = event;
                ps.pi = 0.0;
                if (joined) {
                    ps.status = PairStatus::joined;
                    continue;
                }
                ps.status = PairStatus::divided;
                if (!fresh) {
                    PartitionRecord rec;
                    rec.key = next_key_++;
                    rec.owner_event = event;
                    rec.time = t;
                    rec.position = x;
                    rec.interval = meeting;
                    rec.classes = groups;
                    fresh = rec.key;
                    records_.emplace(rec.key, std::move(rec));
                }
                ps.partition_key = fresh;
                ++records_.at(*fresh).users;
            }
        }
    }

    void recompute(const FieldState& state) {
        const double n = static_cast<double>(state.alive_count());
        double never = n * (n - 1.0) / 2.0 - static_cast<double>(pairs_.size());
        double sum = bounds_.norm_d2_ww * never;
        for (auto& [key, ps] : pairs_) {
            expects(state.wave(key.first).sign == state.wave(key.second).sign,
                    "waves of opposite sign recorded as interacted");
            if (ps.status == PairStatus::joined) {
                ps.weight = 0.0;
            } else {
                const WaveRecord& a = state.wave(key.first);
                const WaveRecord& b = state.wave(key.second);
                const double span = eps_ * static_cast<double>(std::abs(b.right_state - a.right_state + a.sign));
                ps.weight = ps.pi / span;
            }
            sum += ps.weight;
        }
        q_quadratic_ = sum * eps_ * eps_;
    }

    const FluxSpec* spec_;
    DerivativeBounds bounds_;
    double eps_;
    double time_ = 0.0;
    double q_quadratic_ = 0.0;
    std::size_t next_key_ = 0;
    std::map<WavePair, PairState> pairs_;
    std::map<std::size_t, PartitionRecord> records_;
};

}  // namespace wavefront
