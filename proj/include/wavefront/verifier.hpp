#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wavefront/core.hpp"
#include "wavefront/effective_flux.hpp"
#include "wavefront/flux_models.hpp"
#include "wavefront/pair_history.hpp"
#include "wavefront/report.hpp"
#include "wavefront/simulator.hpp"
#include "wavefront/wavefield.hpp"

namespace wavefront {

// Speed changes at a v-front crossing are bounded by the v-jump times the crossing strength.
inline CheckResult check_transversal_speed(const Event& ev, const DerivativeBounds& b) {
    expects(ev.kind == EventKind::transversal, "transversal speed check on another event kind");
    return make_check("transversal_speed_change", ev.index, ev.speed_variation(),
                      b.norm_d2_wv * ev.v_strength() * ev.meeting_strength());
}

inline CheckResult check_cancellation(const Event& ev, const DerivativeBounds& b, double tv_w0) {
    expects(ev.kind == EventKind::cancellation, "cancellation check on another event kind");
    return make_check("cancellation_speed_change", ev.index, ev.speed_variation(),
                      b.norm_d2_ww * tv_w0 * cancellation_amount(ev));
}

inline CheckResult check_interaction_decrease(const Event& ev, double q_before, double q_after) {
    expects(is_interaction(ev.kind), "interaction check on another event kind");
    return make_check("interaction_speed_change", ev.index, ev.speed_variation(), 2.0 * (q_before - q_after));
}

inline CheckResult check_quadratic_nonincreasing(const std::string& name, const Event& ev, double q_before,
                                                 double q_after) {
    return make_check(name, ev.index, q_after, q_before);
}

inline CheckResult check_transversal_increase(const Event& ev, double q_before, double q_after,
                                              const DerivativeBounds& b, double tv_w0) {
    expects(ev.kind == EventKind::transversal, "transversal increase check on another event kind");
    return make_check("transversal_quadratic_increase", ev.index, q_after - q_before,
                      6.0 * std::log(2.0) * b.norm_d3_wwv * ev.v_strength() * ev.meeting_strength() * tv_w0);
}

// Difference of chord speeds of the two interacting fronts (effective flux before the event)
// against the pair weights accumulated so far.
inline CheckResult check_wavefront_decrease(const Event& ev, const FieldState& pre, const PairHistory& history,
                                            const FluxSpec& spec) {
    expects(is_interaction(ev.kind), "wavefront decrease check on another event kind");
    const EffectiveFluxTable table(pre, spec);
    const double eps = pre.eps;
    const double len_l = eps * static_cast<double>(ev.left_waves.size());
    const double len_r = eps * static_cast<double>(ev.right_waves.size());
    const double lhs = (table.rh_speed_of(ev.left_waves) - table.rh_speed_of(ev.right_waves)) * len_l * len_r;
    double rhs = 0.0;
    const double never = history.bounds().norm_d2_ww * (len_l + len_r) * eps * eps;
    for (WaveId s : ev.left_waves)
        for (WaveId s2 : ev.right_waves)
            rhs += history.status(s, s2) == PairStatus::never_interacted ? never : history.pi(s, s2) * eps * eps;
    return make_check("wavefront_speed_gap", ev.index, lhs, rhs);
}

inline CheckResult check_qtrans_step(const Event& ev, double before, double after) {
    if (ev.kind != EventKind::transversal) return make_check("qtrans_nonincreasing", ev.index, after, before);
    const double expected = ev.v_strength() * ev.meeting_strength();
    const double drop = before - after;
    return make_check("qtrans_transversal_drop", ev.index, std::abs(drop - expected) / std::max(1.0, expected), 0.0);
}

struct RunTotals {
    double tv_w0 = 0.0;
    double tv_v0 = 0.0;
    double interaction = 0.0;
    double transversal = 0.0;
    double cancellation = 0.0;

    double all() const { return interaction + transversal + cancellation; }
};

inline RunTotals run_totals(const std::vector<Event>& events, double tv_w0, double tv_v0) {
    RunTotals t;
    t.tv_w0 = tv_w0;
    t.tv_v0 = tv_v0;
    for (const auto& ev : events) {
        const double dv = ev.speed_variation();
        if (ev.kind == EventKind::transversal)
            t.transversal += dv;
        else if (ev.kind == EventKind::cancellation)
            t.cancellation += dv;
        else
            t.interaction += dv;
    }
    return t;
}

inline CheckResult check_main_theorem(const RunTotals& t, const DerivativeBounds& b) {
    const double rhs = (3.0 * b.norm_d2_ww + 12.0 * std::log(2.0) * b.norm_d3_wwv * t.tv_v0) * t.tv_w0 * t.tv_w0 +
                       b.norm_d2_wv * t.tv_w0 * t.tv_v0;
    return make_check("total_speed_change", kGlobalCheck, t.all(), rhs);
}

// With no v-fronts the total reduces to the scalar estimate.
inline CheckResult check_main_theorem_scalar(const RunTotals& t, const DerivativeBounds& b) {
    expects(t.tv_v0 == 0.0, "scalar estimate needs v0 constant");
    return make_check("total_speed_change_scalar", kGlobalCheck, t.all(), 3.0 * b.norm_d2_ww * t.tv_w0 * t.tv_w0);
}

inline std::vector<CheckResult> check_sums(const RunTotals& t, const DerivativeBounds& b) {
    return {
        make_check("transversal_total", kGlobalCheck, t.transversal, b.norm_d2_wv * t.tv_w0 * t.tv_v0),
        make_check("cancellation_total", kGlobalCheck, t.cancellation, b.norm_d2_ww * t.tv_w0 * t.tv_w0),
        make_check("interaction_total", kGlobalCheck, t.interaction,
                   2.0 * (b.norm_d2_ww + 6.0 * std::log(2.0) * b.norm_d3_wwv * t.tv_v0) * t.tv_w0 * t.tv_w0),
    };
}

inline std::vector<CheckResult> check_initial_functionals(const FunctionalSnapshot& initial, const RunTotals& t,
                                                          const DerivativeBounds& b) {
    return {
        make_check("qtrans_initial", kGlobalCheck, initial.q_trans, t.tv_v0 * t.tv_w0),
        make_check("quadratic_initial", kGlobalCheck, initial.q_quadratic, b.norm_d2_ww * t.tv_w0 * t.tv_w0),
    };
}

inline CheckResult check_quadratic_nonnegative(const std::vector<FunctionalSnapshot>& series) {
    double lowest = 0.0;
    for (const auto& s : series) lowest = std::min(lowest, s.q_quadratic);
    return make_check("quadratic_nonnegative", kGlobalCheck, -lowest, 0.0);
}

// Full-level structural checks on one state.
inline std::vector<CheckResult> check_enumeration(const FieldState& state, std::size_t event) {
    const EnumerationReport rep = validate_enumeration(state);
    GridIndex jumps = 0;
    for (const Front& f : state.fronts)
        if (f.carries_waves()) jumps += std::abs(f.right_state - f.left_state);
    const double tv_profile = state.eps * static_cast<double>(jumps);
    return {
        make_check("enumeration_valid", event, static_cast<double>(rep.violations.size()), 0.0),
        make_check("push_forward", event, push_forward_holds(state) ? 0.0 : 1.0, 0.0),
        make_check("total_variation_count", event, std::abs(tv_profile - state.total_variation()), 0.0),
    };
}

// Waves in one partition class must share position and speed.
inline CheckResult check_partition_separation(const PairHistory& history, const FieldState& state,
                                              std::size_t event) {
    const auto front_of = state.front_of_wave();
    double bad = 0.0;
    for (const auto& [key, rec] : history.records())
        for (const auto& cls : rec.classes)
            for (WaveId id : cls)
                if (front_of.at(id) != front_of.at(cls.front())) bad += 1.0;
    return make_check("partition_separation", event, bad, 0.0);
}

// Double integral of 1/(w' - w) over [a, xi] x [xi, b], by nested tanh-sinh quadrature.
inline double log2_kernel_integral(double a, double xi, double b) {
    expects(a < xi && xi < b, "kernel integral needs a < xi < b");
    boost::math::quadrature::tanh_sinh<double> rule;
    const auto inner = [&](double gap_left) {
        // gap_left = xi - w > 0
        return rule.integrate(
            [&](double x, double xc) {
                const double from_xi = xc < 0 ? -xc : x - xi;  // xc is a - x near a, b - x near b
                return 1.0 / (from_xi + gap_left);
            },
            xi, b);
    };
    return rule.integrate(
        [&](double x, double xc) {
            const double gap = xc > 0 ? xc : xi - x;
            return inner(gap);
        },
        a, xi);
}

inline CheckResult check_log2_kernel(int samples = 50, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_slack = std::numeric_limits<double>::infinity();
    CheckResult worst;
    for (int i = 0; i < samples; ++i) {
        const double a = -1.0 + unit(rng);
        const double b = a + 0.05 + 2.0 * unit(rng);
        const double xi = a + (b - a) * (0.01 + 0.98 * unit(rng));
        CheckResult r = make_check("log2_kernel", kGlobalCheck, log2_kernel_integral(a, xi, b),
                                   std::log(2.0) * (b - a) + 1e-6);
        if (r.slack < worst_slack) {
            worst_slack = r.slack;
            worst = r;
        }
    }
    return worst;
}

}  // namespace wavefront
