#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/envelopes.hpp"
#include "wavefront/flux_models.hpp"
#include "wavefront/wavefield.hpp"

namespace wavefront {

// Node range [lo, hi] covered by the cells of a homogeneous run of alive waves (id order).
struct WaveSpan {
    GridIndex lo = 0;
    GridIndex hi = 0;
    int sign = 1;
};

inline WaveSpan span_of(const FieldState& state, const std::vector<WaveId>& ids) {
    expects(!ids.empty(), "empty set of waves has no span");
    const WaveRecord& first = state.wave(ids.front());
    const int sign = first.sign;
    GridIndex expected = first.right_state;
    for (WaveId id : ids) {
        const WaveRecord& rec = state.wave(id);
        expects(rec.alive, "span of a dead wave");
        expects(rec.sign == sign, "waves of mixed sign are not homogeneous");
        expects(rec.right_state == expected, "waves do not cover an interval of w-values");
        expected += sign;
    }
    const GridIndex last = expected - sign;
    if (sign > 0) return {first.right_state - 1, last, sign};
    return {last, first.right_state + 1, sign};
}

// Effective flux of a maximal homogeneous block: on each wave's cell its second derivative is
// d2_ww(., v at the wave).
inline EffectiveFlux effective_flux(const FieldState& state, const std::vector<WaveId>& block,
                                    const FluxSpec& spec) {
    const WaveSpan span = span_of(state, block);
    const auto v_at = state.wave_v();
    std::vector<double> cell_v(static_cast<std::size_t>(span.hi - span.lo), 0.0);
    for (WaveId id : block) {
        const GridIndex c = state.wave(id).cell();
        cell_v[static_cast<std::size_t>(c - span.lo)] = static_cast<double>(v_at.at(id)) * state.eps;
    }
    return build_effective_flux(spec, state.eps, span.lo, std::move(cell_v));
}

// Effective fluxes of every maximal block of one state, looked up by wave id.
class EffectiveFluxTable {
public:
    EffectiveFluxTable(const FieldState& state, const FluxSpec& spec) : state_(&state) {
        for (const auto& block : maximal_blocks(state)) {
            const std::size_t b = fluxes_.size();
            fluxes_.push_back(effective_flux(state, block, spec));
            for (WaveId id : block) block_of_[id] = b;
        }
    }

    const EffectiveFlux& for_wave(WaveId id) const {
        auto it = block_of_.find(id);
        expects(it != block_of_.end(), "wave has no effective flux (dead?)");
        return fluxes_[it->second];
    }

    // Chord speed over the cells of a homogeneous run of alive waves.
    double rh_speed_of(const std::vector<WaveId>& ids) const {
        const WaveSpan span = span_of(*state_, ids);
        return rh_speed(for_wave(ids.front()), span.lo, span.hi);
    }

    // Splits a homogeneous run of alive waves (id order) into the groups the Riemann problem
    // over their cells, with this flux, does not divide.
    std::vector<std::vector<WaveId>> entropic_classes(const std::vector<WaveId>& ids) const {
        if (ids.size() <= 1) return {ids};
        const WaveSpan span = span_of(*state_, ids);
        const EnvelopeResult env = envelope(for_wave(ids.front()).nodes, span.lo, span.hi, hull_for_sign(span.sign));
        std::vector<std::vector<WaveId>> out;
        double prev = 0.0;
        for (WaveId id : ids) {
            const double slope = env.slope_at_cell(state_->wave(id).cell());
            if (out.empty() || std::abs(slope - prev) > kSlopeTolerance) out.emplace_back();
            out.back().push_back(id);
            prev = slope;
        }
        return out;
    }

private:
    const FieldState* state_;
    std::vector<EffectiveFlux> fluxes_;
    std::unordered_map<WaveId, std::size_t> block_of_;
};

}  // namespace wavefront
