#pragma once

#include <algorithm>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/envelopes.hpp"
#include "wavefront/flux_models.hpp"

namespace wavefront {

struct RiemannFront {
    int family = 2;
    GridIndex w_left = 0;
    GridIndex w_right = 0;
    GridIndex v_left = 0;
    GridIndex v_right = 0;
    double speed = 0.0;
    std::vector<GridIndex> cells;  // member cells [c, c+1], left to right in x

    int sign() const { return sign_of(w_right - w_left); }
};

struct RiemannFan {
    std::vector<RiemannFront> fronts;

    bool empty() const { return fronts.empty(); }
    std::size_t size() const { return fronts.size(); }
};

// Scalar problem w_minus -> w_plus under the piecewise affine flux g; v only labels the fronts.
inline RiemannFan solve_scalar(GridIndex w_minus, GridIndex w_plus, const PiecewiseAffineFlux& g,
                               GridIndex v = 0) {
    expects(g.has_node(w_minus) && g.has_node(w_plus), "Riemann states must be grid nodes of the flux");
    RiemannFan fan;
    if (w_minus == w_plus) return fan;
    const int sign = sign_of(w_plus - w_minus);
    const GridIndex lo = std::min(w_minus, w_plus);
    const GridIndex hi = std::max(w_minus, w_plus);
    const EnvelopeResult env = envelope(g, lo, hi, hull_for_sign(sign));
    std::vector<CellRun> runs = equal_slope_runs(env);
    if (sign < 0) std::reverse(runs.begin(), runs.end());
    for (const CellRun& run : runs) {
        RiemannFront front;
        front.family = 2;
        front.v_left = v;
        front.v_right = v;
        front.speed = rh_speed(g, run.lo, run.hi);
        if (sign > 0) {
            front.w_left = run.lo;
            front.w_right = run.hi;
            for (GridIndex c = run.lo; c < run.hi; ++c) front.cells.push_back(c);
        } else {
            front.w_left = run.hi;
            front.w_right = run.lo;
            for (GridIndex c = run.hi - 1; c >= run.lo; --c) front.cells.push_back(c);
        }
        fan.fronts.push_back(std::move(front));
    }
    return fan;
}

inline void require_state_in_box(const FluxSpec& spec, double eps, GridIndex w, GridIndex v) {
    if (!spec.box.contains_w(static_cast<double>(w) * eps) || !spec.box.contains_v(static_cast<double>(v) * eps))
        throw DomainError("Riemann state outside the flux box");
}

// Left state (w_minus, v_minus), right state (w_plus, v_plus). The w-jump is solved with the
// flux at the right v-state, after a first-family front of speed -1.
inline RiemannFan solve_triangular(GridIndex w_minus, GridIndex v_minus, GridIndex w_plus, GridIndex v_plus,
                                   const FluxSpec& spec, double eps) {
    require_state_in_box(spec, eps, w_minus, v_minus);
    require_state_in_box(spec, eps, w_plus, v_plus);
    RiemannFan fan;
    if (v_minus != v_plus) {
        RiemannFront first;
        first.family = 1;
        first.w_left = w_minus;
        first.w_right = w_minus;
        first.v_left = v_minus;
        first.v_right = v_plus;
        first.speed = -1.0;
        fan.fronts.push_back(first);
    }
    if (w_minus != w_plus) {
        const PiecewiseAffineFlux g = interpolate(spec, static_cast<double>(v_plus) * eps, eps,
                                                  std::min(w_minus, w_plus), std::max(w_minus, w_plus));
        for (RiemannFront& front : solve_scalar(w_minus, w_plus, g, v_plus).fronts) {
            if (!(front.speed > -1.0)) throw DomainError("second-family speed not above -1");
            fan.fronts.push_back(std::move(front));
        }
    }
    return fan;
}

}  // namespace wavefront
