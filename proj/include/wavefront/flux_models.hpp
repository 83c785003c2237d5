#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "wavefront/core.hpp"

namespace wavefront {

struct Box {
    double w_min = -0.8;
    double w_max = 0.8;
    double v_min = -0.5;
    double v_max = 0.5;

    bool contains_w(double w) const { return w >= w_min - 1e-12 && w <= w_max + 1e-12; }
    bool contains_v(double v) const { return v >= v_min - 1e-12 && v <= v_max + 1e-12; }
};

using Bivariate = std::function<double(double, double)>;

// Smooth flux f(w, v) with analytic partial derivatives.
struct FluxSpec {
    std::string name;
    Bivariate eval;
    Bivariate d_w;
    Bivariate d2_ww;
    Bivariate d2_wv;
    Bivariate d3_wwv;
    Box box;
};

// f = w^2/2 + c v w^2
inline FluxSpec quadratic_coupled(double c = 0.1, Box box = {}) {
    FluxSpec f;
    f.name = "quadratic_coupled";
    f.eval = [c](double w, double v) { return 0.5 * w * w + c * v * w * w; };
    f.d_w = [c](double w, double v) { return w * (1.0 + 2.0 * c * v); };
    f.d2_ww = [c](double, double v) { return 1.0 + 2.0 * c * v; };
    f.d2_wv = [c](double w, double) { return 2.0 * c * w; };
    f.d3_wwv = [c](double, double) { return 2.0 * c; };
    f.box = box;
    return f;
}

// f = w^4/4 - w^2/2 + c v w^2
inline FluxSpec quartic(double c = 0.1, Box box = {}) {
    FluxSpec f;
    f.name = "quartic";
    f.eval = [c](double w, double v) {
        const double w2 = w * w;
        return 0.25 * w2 * w2 - 0.5 * w2 + c * v * w2;
    };
    f.d_w = [c](double w, double v) { return w * w * w - w + 2.0 * c * v * w; };
    f.d2_ww = [c](double w, double v) { return 3.0 * w * w - 1.0 + 2.0 * c * v; };
    f.d2_wv = [c](double w, double) { return 2.0 * c * w; };
    f.d3_wwv = [c](double, double) { return 2.0 * c; };
    f.box = box;
    return f;
}

// f = sum_ij a[i][j] w^i v^j
inline FluxSpec custom_poly(std::vector<std::vector<double>> a, Box box = {}) {
    expects(!a.empty(), "custom_poly needs at least one coefficient row");
    auto shared = std::make_shared<const std::vector<std::vector<double>>>(std::move(a));
    // dw, dv: derivative orders in w and v.
    auto term_sum = [shared](int dw, int dv) {
        return [shared, dw, dv](double w, double v) {
            double total = 0.0;
            const auto& coef = *shared;
            for (std::size_t i = 0; i < coef.size(); ++i) {
                if (static_cast<int>(i) < dw) continue;
                double wfac = 1.0;
                for (int k = 0; k < dw; ++k) wfac *= static_cast<double>(static_cast<int>(i) - k);
                const double wpow = std::pow(w, static_cast<int>(i) - dw);
                for (std::size_t j = 0; j < coef[i].size(); ++j) {
                    if (static_cast<int>(j) < dv || coef[i][j] == 0.0) continue;
                    double vfac = 1.0;
                    for (int k = 0; k < dv; ++k) vfac *= static_cast<double>(static_cast<int>(j) - k);
                    total += coef[i][j] * wfac * vfac * wpow * std::pow(v, static_cast<int>(j) - dv);
                }
            }
            return total;
        };
    };
    FluxSpec f;
    f.name = "custom_poly";
    f.eval = term_sum(0, 0);
    f.d_w = term_sum(1, 0);
    f.d2_ww = term_sum(2, 0);
    f.d2_wv = term_sum(1, 1);
    f.d3_wwv = term_sum(2, 1);
    f.box = box;
    return f;
}

struct DerivativeBounds {
    double norm_d2_ww = 0.0;
    double norm_d2_wv = 0.0;
    double norm_d3_wwv = 0.0;
};

namespace detail {

template <class Visit>
void for_each_box_sample(const Box& box, int grid_n, Visit&& visit) {
    for (int i = 0; i < grid_n; ++i) {
        const double w = box.w_min + (box.w_max - box.w_min) * i / (grid_n - 1);
        for (int j = 0; j < grid_n; ++j) {
            const double v = box.v_min + (box.v_max - box.v_min) * j / (grid_n - 1);
            visit(w, v);
        }
    }
}

}  // namespace detail

inline DerivativeBounds derivative_bounds(const FluxSpec& spec, int grid_n = 129) {
    expects(grid_n >= 64, "derivative_bounds needs grid_n >= 64");
    DerivativeBounds b;
    detail::for_each_box_sample(spec.box, grid_n, [&](double w, double v) {
        b.norm_d2_ww = std::max(b.norm_d2_ww, std::abs(spec.d2_ww(w, v)));
        b.norm_d2_wv = std::max(b.norm_d2_wv, std::abs(spec.d2_wv(w, v)));
        b.norm_d3_wwv = std::max(b.norm_d3_wwv, std::abs(spec.d3_wwv(w, v)));
    });
    b.norm_d2_ww *= 1.01;
    b.norm_d2_wv *= 1.01;
    b.norm_d3_wwv *= 1.01;
    return b;
}

// Smallest sampled characteristic speed; the solver needs it above -1.
inline double min_characteristic_speed(const FluxSpec& spec, int grid_n = 129) {
    double lo = std::numeric_limits<double>::infinity();
    detail::for_each_box_sample(spec.box, grid_n,
                                [&](double w, double v) { lo = std::min(lo, spec.d_w(w, v)); });
    return lo;
}

inline void require_hyperbolic(const FluxSpec& spec, int grid_n = 129) {
    if (!(min_characteristic_speed(spec, grid_n) > -1.0))
        throw DomainError("flux '" + spec.name + "' has characteristic speed <= -1 inside its box");
}

// Nodal values of a function on consecutive nodes base_index, base_index+1, ... of eps*Z,
// affine in between.
struct PiecewiseAffineFlux {
    double eps = 1.0;
    GridIndex base_index = 0;
    std::vector<double> values;

    GridIndex first_node() const { return base_index; }
    GridIndex last_node() const { return base_index + static_cast<GridIndex>(values.size()) - 1; }
    bool has_node(GridIndex i) const { return i >= first_node() && i <= last_node(); }
    double coordinate(GridIndex i) const { return static_cast<double>(i) * eps; }

    double at(GridIndex i) const {
        expects(has_node(i), "node outside the sampled range");
        return values[static_cast<std::size_t>(i - base_index)];
    }

    // Slope of the interpolant on the cell [c, c+1].
    double cell_slope(GridIndex c) const { return (at(c + 1) - at(c)) / eps; }

    double operator()(double w) const {
        const double u = w / eps;
        GridIndex c = static_cast<GridIndex>(std::floor(u));
        c = std::clamp(c, first_node(), last_node() - 1);
        const double theta = u - static_cast<double>(c);
        return at(c) + theta * (at(c + 1) - at(c));
    }
};

inline PiecewiseAffineFlux from_values(double eps, GridIndex base, std::vector<double> values) {
    expects(eps > 0.0, "grid step must be positive");
    expects(values.size() >= 2, "piecewise affine function needs at least two nodes");
    return PiecewiseAffineFlux{eps, base, std::move(values)};
}

// f_eps(., v) on the nodes a..b.
inline PiecewiseAffineFlux interpolate(const FluxSpec& spec, double v, double eps, GridIndex a,
                                       GridIndex b) {
    expects(eps > 0.0, "grid step must be positive");
    expects(a < b, "interpolation range must have a < b");
    if (!spec.box.contains_w(static_cast<double>(a) * eps) ||
        !spec.box.contains_w(static_cast<double>(b) * eps) || !spec.box.contains_v(v))
        throw DomainError("interpolation range outside the flux box");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(b - a + 1));
    for (GridIndex i = a; i <= b; ++i) values.push_back(spec.eval(static_cast<double>(i) * eps, v));
    return PiecewiseAffineFlux{eps, a, std::move(values)};
}

// Flux whose second w-derivative on each cell is d2_ww(., v_cell), anchored with value and
// slope 0 at the left node.
struct EffectiveFlux {
    PiecewiseAffineFlux nodes;
    std::vector<double> node_slopes;
    std::vector<double> cell_v;
    Bivariate d2_ww;

    GridIndex first_node() const { return nodes.first_node(); }
    GridIndex last_node() const { return nodes.last_node(); }

    double value(double w) const { return evaluate(w).first; }
    double derivative(double w) const { return evaluate(w).second; }

private:
    std::pair<double, double> evaluate(double w) const {
        const double eps = nodes.eps;
        GridIndex c = static_cast<GridIndex>(std::floor(w / eps));
        c = std::clamp(c, first_node(), last_node() - 1);
        const std::size_t k = static_cast<std::size_t>(c - first_node());
        const double left = nodes.coordinate(c);
        if (w == left) return {nodes.values[k], node_slopes[k]};
        const double v = cell_v[k];
        const auto g = [this, v](double tau) { return d2_ww(tau, v); };
        const auto taylor = [&](double tau) { return (w - tau) * g(tau); };
        using Rule = boost::math::quadrature::gauss<double, 16>;
        const double value = nodes.values[k] + node_slopes[k] * (w - left) + Rule::integrate(taylor, left, w);
        const double slope = node_slopes[k] + Rule::integrate(g, left, w);
        return {value, slope};
    }
};

// cell_v[k] labels the cell [lo+k, lo+k+1].
inline EffectiveFlux build_effective_flux(const FluxSpec& spec, double eps, GridIndex lo,
                                          std::vector<double> cell_v) {
    expects(!cell_v.empty(), "effective flux needs at least one cell");
    using Rule = boost::math::quadrature::gauss<double, 16>;
    const std::size_t n = cell_v.size();
    std::vector<double> values(n + 1, 0.0);
    std::vector<double> slopes(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = static_cast<double>(lo + static_cast<GridIndex>(k)) * eps;
        const double b = static_cast<double>(lo + static_cast<GridIndex>(k) + 1) * eps;
        const double v = cell_v[k];
        const auto g = [&spec, v](double tau) { return spec.d2_ww(tau, v); };
        const auto taylor = [&](double tau) { return (b - tau) * g(tau); };
        slopes[k + 1] = slopes[k] + Rule::integrate(g, a, b);
        values[k + 1] = values[k] + slopes[k] * (b - a) + Rule::integrate(taylor, a, b);
    }
    EffectiveFlux out;
    out.nodes = PiecewiseAffineFlux{eps, lo, std::move(values)};
    out.node_slopes = std::move(slopes);
    out.cell_v = std::move(cell_v);
    out.d2_ww = spec.d2_ww;
    return out;
}

}  // namespace wavefront
