#pragma once

#include <cmath>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/flux_models.hpp"

namespace wavefront {

enum class HullSide { convex, concave };

inline HullSide hull_for_sign(int sign) { return sign > 0 ? HullSide::convex : HullSide::concave; }

struct EnvelopeResult {
    HullSide side = HullSide::convex;
    double eps = 1.0;
    GridIndex first = 0;
    GridIndex last = 0;
    std::vector<double> node_values;
    std::vector<double> cell_slopes;     // cell k spans nodes first+k, first+k+1
    std::vector<bool> contact_flags;

    std::size_t cell_count() const { return cell_slopes.size(); }
    bool contains_cell(GridIndex c) const { return c >= first && c < last; }

    double value_at(GridIndex i) const {
        expects(i >= first && i <= last, "node outside the envelope interval");
        return node_values[static_cast<std::size_t>(i - first)];
    }
    bool contact_at(GridIndex i) const {
        expects(i >= first && i <= last, "node outside the envelope interval");
        return contact_flags[static_cast<std::size_t>(i - first)];
    }
    double slope_at_cell(GridIndex c) const {
        expects(contains_cell(c), "cell outside the envelope interval");
        return cell_slopes[static_cast<std::size_t>(c - first)];
    }
};

namespace detail {

inline EnvelopeResult hull(const PiecewiseAffineFlux& g, GridIndex a, GridIndex b, HullSide side) {
    expects(a < b, "envelope interval must have a < b");
    expects(g.has_node(a) && g.has_node(b), "envelope interval must consist of grid nodes of the flux");
    const auto y = [&](GridIndex i) { return g.at(i); };
    // Keeps p1 when the turn p0 -> p1 -> p2 is convex (or concave); collinear points stay.
    const auto keeps = [&](GridIndex p0, GridIndex p1, GridIndex p2) {
        const double lhs = (y(p1) - y(p0)) * static_cast<double>(p2 - p1);
        const double rhs = (y(p2) - y(p1)) * static_cast<double>(p1 - p0);
        return side == HullSide::convex ? lhs <= rhs : lhs >= rhs;
    };

    std::vector<GridIndex> vertices;
    vertices.reserve(static_cast<std::size_t>(b - a + 1));
    for (GridIndex i = a; i <= b; ++i) {
        while (vertices.size() >= 2 && !keeps(vertices[vertices.size() - 2], vertices.back(), i))
            vertices.pop_back();
        vertices.push_back(i);
    }

    EnvelopeResult r;
    r.side = side;
    r.eps = g.eps;
    r.first = a;
    r.last = b;
    const std::size_t n = static_cast<std::size_t>(b - a);
    r.node_values.assign(n + 1, 0.0);
    r.cell_slopes.assign(n, 0.0);
    r.contact_flags.assign(n + 1, false);
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
        const GridIndex lo = vertices[k];
        const GridIndex hi = vertices[k + 1];
        const double rise = y(hi) - y(lo);
        const double per_node = rise / static_cast<double>(hi - lo);
        const double slope = rise / (static_cast<double>(hi - lo) * g.eps);
        for (GridIndex i = lo; i < hi; ++i) {
            const auto at = static_cast<std::size_t>(i - a);
            r.node_values[at] = i == lo ? y(lo) : y(lo) + per_node * static_cast<double>(i - lo);
            r.cell_slopes[at] = slope;
        }
    }
    for (GridIndex v : vertices) r.contact_flags[static_cast<std::size_t>(v - a)] = true;
    r.node_values[n] = y(b);
    return r;
}

}  // namespace detail

inline EnvelopeResult convex_envelope(const PiecewiseAffineFlux& g, GridIndex a, GridIndex b) {
    return detail::hull(g, a, b, HullSide::convex);
}

inline EnvelopeResult concave_envelope(const PiecewiseAffineFlux& g, GridIndex a, GridIndex b) {
    return detail::hull(g, a, b, HullSide::concave);
}

inline EnvelopeResult envelope(const PiecewiseAffineFlux& g, GridIndex a, GridIndex b, HullSide side) {
    return detail::hull(g, a, b, side);
}

// Chord slope of g over the nodes lo..hi.
inline double rh_speed(const PiecewiseAffineFlux& g, GridIndex lo, GridIndex hi) {
    expects(lo != hi, "Rankine-Hugoniot speed needs a nondegenerate interval");
    if (lo > hi) std::swap(lo, hi);
    return (g.at(hi) - g.at(lo)) / (static_cast<double>(hi - lo) * g.eps);
}

inline double rh_speed(const EffectiveFlux& g, GridIndex lo, GridIndex hi) {
    return rh_speed(g.nodes, lo, hi);
}

// Envelope slope on the cell [cell, cell+1] for the Riemann problem over lo..hi:
// convex envelope for positive waves, concave for negative ones.
inline double entropic_speed(const PiecewiseAffineFlux& g, GridIndex lo, GridIndex hi, GridIndex cell,
                             int sign) {
    if (lo > hi) std::swap(lo, hi);
    expects(cell >= lo && cell < hi, "cell outside the Riemann interval");
    return envelope(g, lo, hi, hull_for_sign(sign)).slope_at_cell(cell);
}

inline bool divides(const EnvelopeResult& env, GridIndex cell_a, GridIndex cell_b) {
    return std::abs(env.slope_at_cell(cell_a) - env.slope_at_cell(cell_b)) > kSlopeTolerance;
}

inline bool divides(const PiecewiseAffineFlux& g, GridIndex lo, GridIndex hi, GridIndex cell_a,
                    GridIndex cell_b, int sign) {
    if (lo > hi) std::swap(lo, hi);
    expects(cell_a >= lo && cell_a < hi && cell_b >= lo && cell_b < hi, "cells outside the Riemann interval");
    return divides(envelope(g, lo, hi, hull_for_sign(sign)), cell_a, cell_b);
}

// Consecutive cells whose envelope slopes agree within the slope tolerance, chained.
struct CellRun {
    GridIndex lo = 0;  // first node
    GridIndex hi = 0;  // last node
};

inline std::vector<CellRun> equal_slope_runs(const EnvelopeResult& env) {
    std::vector<CellRun> runs;
    for (std::size_t k = 0; k < env.cell_count(); ++k) {
        const GridIndex c = env.first + static_cast<GridIndex>(k);
        if (!runs.empty() && std::abs(env.cell_slopes[k] - env.cell_slopes[k - 1]) <= kSlopeTolerance)
            runs.back().hi = c + 1;
        else
            runs.push_back({c, c + 1});
    }
    return runs;
}

}  // namespace wavefront
