#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/effective_flux.hpp"
#include "wavefront/pair_history.hpp"
#include "wavefront/report.hpp"
#include "wavefront/simulator.hpp"
#include "wavefront/wavefield.hpp"

namespace wavefront {

inline constexpr std::size_t kOracleWaveLimit = 12;

// Independent bookkeeping for small runs: every divided pair keeps its own interval, its own
// partition and the full weight table over all pairs of its interval. Partitions at a meeting
// come from the effective flux, not from the resolved fronts.
class PairOracle {
public:
    using Table = std::map<WavePair, double>;

    struct Entry {
        std::vector<WaveId> interval;
        std::vector<std::vector<WaveId>> classes;
        Table table;
    };

    PairOracle(const FieldState& initial, const FluxSpec& spec, const DerivativeBounds& bounds)
        : spec_(&spec), bounds_(bounds), eps_(initial.eps) {
        if (initial.waves.size() > kOracleWaveLimit)
            throw ContractViolation("full weight tables are limited to " + std::to_string(kOracleWaveLimit) + " waves");
        const EffectiveFluxTable table(initial, spec);
        std::vector<WaveId> at_point;
        double x = 0.0;
        auto flush = [&]() {
            if (!at_point.empty()) meet(at_point, table);
            at_point.clear();
        };
        for (const Front& f : initial.fronts) {
            if (!f.carries_waves()) continue;
            if (!at_point.empty() && f.position != x) flush();
            x = f.position;
            at_point.insert(at_point.end(), f.waves.begin(), f.waves.end());
        }
        flush();
    }

    void on_event(const Event& ev, const FieldState& post) {
        if (ev.kind == EventKind::transversal) {
            const std::unordered_set<WaveId> meeting(ev.meeting.begin(), ev.meeting.end());
            const double factor = 2.0 * bounds_.norm_d3_wwv * ev.v_strength();
            for (auto& [key, entry] : divided_) {
                for (auto& [pp, value] : entry.table) {
                    const double m = class_span(entry, meeting, pp.first, pp.second);
                    value += factor * m;
                }
            }
        }
        const EffectiveFluxTable table(post, *spec_);
        for (auto it = divided_.begin(); it != divided_.end();) {
            if (!post.wave(it->first.first).alive || !post.wave(it->first.second).alive) {
                it = divided_.erase(it);
                continue;
            }
            Entry& e = it->second;
            std::vector<WaveId> interval;
            for (WaveId id : e.interval)
                if (post.wave(id).alive) interval.push_back(id);
            e.interval = std::move(interval);
            e.classes = refine_classes(e.classes, post, table);
            for (auto t = e.table.begin(); t != e.table.end();) {
                if (!post.wave(t->first.first).alive || !post.wave(t->first.second).alive)
                    t = e.table.erase(t);
                else
                    ++t;
            }
            ++it;
        }
        std::vector<WaveId> meeting = ev.meeting;
        std::sort(meeting.begin(), meeting.end());
        if (!meeting.empty()) meet(meeting, table);
    }

    bool divided(WaveId s, WaveId s2) const { return divided_.count(ordered(s, s2)) > 0; }

    // pi(t, s, s')[p, p'] for all p < p' in the pair's interval; empty unless the pair is divided.
    Table pi_full_table(WaveId s, WaveId s2) const {
        auto it = divided_.find(ordered(s, s2));
        return it == divided_.end() ? Table{} : it->second.table;
    }

    const std::map<WavePair, Entry>& entries() const { return divided_; }

    // Chord-speed gaps between ordered classes against the full tables.
    CheckResult check_class_speed_bound(const FieldState& state, std::size_t event) const {
        const EffectiveFluxTable table(state, *spec_);
        double worst_slack = std::numeric_limits<double>::infinity();
        CheckResult worst = make_check("class_speed_bound", event, 0.0, 0.0);
        for (const auto& [key, e] : divided_) {
            std::vector<double> speed;
            for (const auto& cls : e.classes) speed.push_back(table.rh_speed_of(cls));
            for (std::size_t a = 0; a < e.classes.size(); ++a)
                for (std::size_t b = a + 1; b < e.classes.size(); ++b)
                    for (WaveId p : e.classes[a])
                        for (WaveId p2 : e.classes[b]) {
                            CheckResult r = make_check("class_speed_bound", event, speed[a] - speed[b],
                                                       e.table.at(ordered(p, p2)));
                            if (r.slack < worst_slack) {
                                worst_slack = r.slack;
                                worst = r;
                            }
                        }
        }
        return worst;
    }

    // Pairs with the same interval carry the same table.
    CheckResult check_outer_pair_agreement(std::size_t event) const {
        double worst = 0.0;
        for (auto a = divided_.begin(); a != divided_.end(); ++a)
            for (auto b = std::next(a); b != divided_.end(); ++b) {
                if (a->second.interval != b->second.interval) continue;
                for (const auto& [pp, value] : a->second.table) {
                    auto other = b->second.table.find(pp);
                    const double d = other == b->second.table.end() ? kInfinity : std::abs(other->second - value);
                    worst = std::max(worst, d / std::max(1.0, std::abs(value)));
                }
            }
        return make_check("outer_pair_weights", event, worst, 0.0);
    }

    // Nested divided pairs p <= s < s' <= p': classes of the outer pair lie inside or outside the
    // inner interval, and coincide entirely when p, p' belong to it.
    CheckResult check_restriction(std::size_t event) const {
        double bad = 0.0;
        for (const auto& [outer, eo] : divided_)
            for (const auto& [inner, ei] : divided_) {
                if (outer == inner || outer.first > inner.first || inner.second > outer.second) continue;
                const std::unordered_set<WaveId> in(ei.interval.begin(), ei.interval.end());
                for (const auto& cls : eo.classes) {
                    const auto inside = std::count_if(cls.begin(), cls.end(), [&](WaveId id) { return in.count(id) > 0; });
                    if (inside != 0 && inside != static_cast<long>(cls.size())) bad += 1.0;
                }
                if (in.count(outer.first) && in.count(outer.second))
                    if (eo.interval != ei.interval || eo.classes != ei.classes) bad += 1.0;
            }
        return make_check("partition_restriction", event, bad, 0.0);
    }

    CheckResult check_separation(const FieldState& state, std::size_t event) const {
        const auto front_of = state.front_of_wave();
        double bad = 0.0;
        for (const auto& [key, e] : divided_)
            for (const auto& cls : e.classes)
                for (WaveId id : cls)
                    if (front_of.at(id) != front_of.at(cls.front())) bad += 1.0;
        return make_check("oracle_partition_separation", event, bad, 0.0);
    }

    // The shared-record bookkeeping must agree with this one on status, weight and partition.
    CheckResult check_agreement(const PairHistory& history, std::size_t event) const {
        double bad = 0.0;
        for (const auto& [key, e] : divided_) {
            const PairState* ps = history.pair(key.first, key.second);
            if (!ps || ps->status != PairStatus::divided) {
                bad += 1.0;
                continue;
            }
            const double mine = e.table.at(key);
            bad += std::abs(ps->pi - mine) / std::max(1.0, std::abs(mine));
            const PartitionRecord* rec = history.partition(key.first, key.second);
            if (!rec || rec->interval != e.interval || rec->classes != e.classes) bad += 1.0;
        }
        for (const auto& [key, ps] : history.pairs())
            if (ps.status == PairStatus::divided && !divided_.count(key)) bad += 1.0;
        return make_check("oracle_agreement", event, bad, 0.0);
    }

    std::vector<CheckResult> check_all(const FieldState& state, const PairHistory& history, std::size_t event) const {
        return {check_class_speed_bound(state, event), check_outer_pair_agreement(event), check_restriction(event),
                check_separation(state, event), check_agreement(history, event)};
    }

private:
    static WavePair ordered(WaveId a, WaveId b) { return a < b ? WavePair{a, b} : WavePair{b, a}; }

    double class_span(const Entry& e, const std::unordered_set<WaveId>& meeting, WaveId p, WaveId p2) const {
        PartitionRecord rec;
        rec.interval = e.interval;
        rec.classes = e.classes;
        return M_value(rec, meeting, p, p2, eps_);
    }

    void meet(const std::vector<WaveId>& meeting, const EffectiveFluxTable& table) {
        std::vector<std::vector<WaveId>> classes = table.entropic_classes(meeting);
        std::map<WaveId, std::size_t> class_of;
        for (std::size_t c = 0; c < classes.size(); ++c)
            for (WaveId id : classes[c]) class_of[id] = c;
        for (std::size_t i = 0; i < meeting.size(); ++i)
            for (std::size_t j = i + 1; j < meeting.size(); ++j) {
                const WavePair key = ordered(meeting[i], meeting[j]);
                if (class_of[key.first] == class_of[key.second]) {
                    divided_.erase(key);
                    continue;
                }
                Entry e;
                e.interval = meeting;
                e.classes = classes;
                for (std::size_t a = 0; a < meeting.size(); ++a)
                    for (std::size_t b = a + 1; b < meeting.size(); ++b) e.table[ordered(meeting[a], meeting[b])] = 0.0;
                divided_[key] = std::move(e);
            }
    }

    const FluxSpec* spec_;
    DerivativeBounds bounds_;
    double eps_;
    std::map<WavePair, Entry> divided_;
};

}  // namespace wavefront
