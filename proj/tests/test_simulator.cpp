#include <random>
#include <set>

#include <gtest/gtest.h>

#include "support/scenarios.hpp"
#include "wavefront/run.hpp"

using namespace wavefront;
using namespace wavefront::testing;

namespace {

FieldState bare_fronts(const std::vector<std::pair<double, double>>& xs) {
    FieldState s;
    s.eps = 0.05;
    for (auto [x, v] : xs) {
        Front f;
        f.position = x;
        f.speed = v;
        s.fronts.push_back(f);
    }
    return s;
}

// Earliest crossing over all pairs of fronts, without using adjacency.
double all_pairs_earliest(const FieldState& s) {
    double best = kInfinity;
    for (std::size_t i = 0; i < s.fronts.size(); ++i)
        for (std::size_t j = i + 1; j < s.fronts.size(); ++j) {
            const Front& a = s.fronts[i];
            const Front& b = s.fronts[j];
            if (a.speed <= b.speed) continue;
            best = std::min(best, s.time + (b.position - a.position) / (a.speed - b.speed));
        }
    return best;
}

}  // namespace

// Recorded from the first run that passed the full check level.
constexpr std::size_t kGoldenSeed42Events = 49;

TEST(NextCollision, TwoApproachingFronts) {
    const auto c = next_collision(bare_fronts({{0.0, 0.5}, {1.0, -0.5}}));
    ASSERT_TRUE(c.has_value());
    EXPECT_DOUBLE_EQ(c->time, 1.0);
    EXPECT_DOUBLE_EQ(c->position, 0.5);
    EXPECT_EQ(c->left, 0u);
}

TEST(NextCollision, ParallelFrontsNeverMeet) {
    EXPECT_FALSE(next_collision(bare_fronts({{0.0, 0.3}, {1.0, 0.3}, {2.5, 0.3}})).has_value());
    EXPECT_FALSE(next_collision(bare_fronts({{0.0, -0.3}, {1.0, 0.1}})).has_value());
}

TEST(NextCollision, SimultaneousCandidatesPickLeftmost) {
    const auto c = next_collision(bare_fronts({{0.0, 0.5}, {1.0, -0.5}, {3.0, 0.5}, {4.0, -0.5}}));
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(c->left, 0u);
    const auto d = next_collision(bare_fronts({{3.0, 0.5}, {4.0, -0.5 + 1e-13}, {5.0, 0.5}, {6.0, -0.5}}));
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->left, 0u);
}

TEST(NextCollision, MatchesAllPairsOracleOnRandomStates) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> gap(0.0, 1.0), speed(-1.0, 1.0);
    for (int n = 0; n < 500; ++n) {
        std::vector<std::pair<double, double>> xs;
        double x = 0.0;
        for (int k = 0; k < 30; ++k) xs.emplace_back(x += gap(rng), speed(rng));
        const FieldState s = bare_fronts(xs);
        const auto c = next_collision(s);
        const double oracle = all_pairs_earliest(s);
        ASSERT_TRUE(c.has_value());
        EXPECT_NEAR(c->time, oracle, 1e-10 * std::max(1.0, oracle));
    }
}

TEST(Resolve, ShockInteractionUnderConvexFlux) {
    const FluxSpec f = quadratic_coupled();
    // shocks 2eps -> eps at x=0 (speed 1.5 eps) and eps -> 0 at x=1 (speed 0.5 eps)
    FieldState s = initialize(step(2, {{0.0, 1}, {1.0, 0}}), StepFunction{}, f, 0.05);
    const auto c = next_collision(s);
    ASSERT_TRUE(c.has_value());
    EXPECT_NEAR(c->time, 1.0 / 0.05, 1e-9);
    const Event ev = resolve(*c, s, f, 1);
    EXPECT_EQ(ev.kind, EventKind::interaction_negative);
    EXPECT_TRUE(ev.canceled.empty());
    ASSERT_EQ(s.fronts.size(), 1u);
    EXPECT_EQ(s.fronts[0].waves, (std::vector<WaveId>{1, 2}));
    EXPECT_NEAR(s.fronts[0].speed, (f.eval(0.1, 0) - f.eval(0.0, 0)) / 0.1, 1e-14);
    EXPECT_FALSE(next_collision(s).has_value());
}

TEST(Resolve, FullCancellation) {
    const FluxSpec f = quadratic_coupled();
    FieldState s = initialize(step(0, {{0.0, 1}, {1.0, 0}}), StepFunction{}, f, 0.05);
    // Equal chords never meet; speed the positive wave up by hand.
    s.fronts[0].speed = 0.5;
    s.wave(1).speed = 0.5;
    const auto c = next_collision(s);
    ASSERT_TRUE(c.has_value());
    const Event ev = resolve(*c, s, f, 1);
    EXPECT_EQ(ev.kind, EventKind::cancellation);
    EXPECT_EQ(ev.canceled.size(), 2u);
    EXPECT_TRUE(ev.meeting.empty());
    EXPECT_DOUBLE_EQ(ev.cancellation(), 0.1);
    EXPECT_DOUBLE_EQ(cancellation_amount(ev), 0.1);
    EXPECT_TRUE(s.fronts.empty());
    for (const auto& w : s.waves) {
        EXPECT_FALSE(w.alive);
        EXPECT_EQ(w.position, kInfinity);
        EXPECT_EQ(w.speed, kInfinity);
        EXPECT_EQ(w.death_time, ev.time);
    }
    EXPECT_TRUE(validate_enumeration(s).ok());
}

TEST(Resolve, PartialCancellation) {
    const FluxSpec f = quadratic_coupled();
    // rarefaction 0 -> 2 eps, then a shock 2 eps -> 0; the fast upper wave hits the shock
    FieldState s = initialize(step(0, {{0.0, 2}, {1.0, 0}}), StepFunction{}, f, 0.05);
    const auto c = next_collision(s);
    ASSERT_TRUE(c.has_value());
    const Event ev = resolve(*c, s, f, 1);
    EXPECT_EQ(ev.kind, EventKind::cancellation);
    EXPECT_EQ(ev.canceled, (std::vector<WaveId>{2, 3}));
    EXPECT_EQ(ev.meeting, (std::vector<WaveId>{4}));
    EXPECT_DOUBLE_EQ(cancellation_amount(ev), 0.1);
    EXPECT_TRUE(validate_enumeration(s).ok());
}

TEST(Resolve, TransversalKeepsCellsAndRespeeds) {
    const FluxSpec f = quadratic_coupled();
    const double eps = 0.05;
    // two-wave shock 2 eps -> 0 at x=0, v-front 0 -> 0.4 at x=0.5
    FieldState s = initialize(step(2, {{0.0, 0}}), step(0, {{0.5, 8}}), f, eps);
    ASSERT_EQ(s.fronts.size(), 2u);
    const DerivativeBounds b = derivative_bounds(f);
    const FieldState pre = s;
    auto c = next_collision(s);
    ASSERT_TRUE(c.has_value());
    const Event ev = resolve(*c, s, f, 1);
    EXPECT_EQ(ev.kind, EventKind::transversal);
    EXPECT_EQ(ev.v_jump, 8);
    EXPECT_EQ(ev.meeting, (std::vector<WaveId>{1, 2}));
    const double chord = (f.eval(0.1, 0.4) - f.eval(0.0, 0.4)) / 0.1;
    for (const auto& ch : ev.speed_changes) {
        EXPECT_EQ(s.wave(ch.id).right_state, pre.wave(ch.id).right_state);
        EXPECT_NEAR(ch.after, chord, 1e-14);
        EXPECT_LE(std::abs(ch.after - ch.before), b.norm_d2_wv * ev.v_strength());
    }
    EXPECT_EQ(s.fronts.front().family, Family::first);
    EXPECT_FALSE(next_collision(s).has_value());
}

TEST(Resolve, OnlyMeetingWavesChangeSpeed) {
    const FluxSpec f = quartic();
    const Scenario sc = random_scenario(7, 24, 4, 0.05, f.box);
    FieldState s = initialize(sc.w0, sc.v0, f, 0.05);
    while (auto c = next_collision(s)) {
        const FieldState pre = s;
        const Event ev = resolve(*c, s, f, 0);
        std::set<WaveId> touched(ev.meeting.begin(), ev.meeting.end());
        touched.insert(ev.canceled.begin(), ev.canceled.end());
        for (const auto& w : pre.waves)
            if (w.alive && !touched.count(w.id)) {
                EXPECT_EQ(s.wave(w.id).speed, w.speed);
            }
    }
}

TEST(Resolve, StaleCollisionIsContractViolation) {
    const FluxSpec f = quadratic_coupled();
    FieldState s = initialize(step(2, {{0.0, 1}, {1.0, 0}}), StepFunction{}, f, 0.05);
    const auto c = next_collision(s);
    ASSERT_TRUE(c.has_value());
    advance(s, c->time + 1.0);
    EXPECT_THROW(resolve(*c, s, f), ContractViolation);
}

TEST(Run, SingleShockHasNoEvents) {
    const Trajectory t = simulate(step(4, {{1.0, -2}}), StepFunction{}, quadratic_coupled(), 0.05);
    EXPECT_TRUE(t.events.empty());
    EXPECT_TRUE(t.report.passed());
}

TEST(Run, OneVFrontAndOneShock) {
    const FluxSpec f = quadratic_coupled();
    // v-front right of the shock: it sweeps across once.
    const Trajectory right = simulate(step(4, {{1.0, -2}}), step(0, {{3.0, 5}}), f, 0.05);
    ASSERT_EQ(right.events.size(), 1u);
    EXPECT_EQ(right.events[0].kind, EventKind::transversal);
    // v-front left of the shock moves away at speed -1.
    const Trajectory left = simulate(step(4, {{1.0, -2}}), step(0, {{0.0, 5}}), f, 0.05);
    EXPECT_TRUE(left.events.empty());
}

TEST(Run, EventGuardRaisesRunaway) {
    const FluxSpec f = quadratic_coupled();
    const Scenario sc = random_scenario(3, 20, 3, 0.05, f.box);
    RunOptions o;
    o.event_guard = 2;
    EXPECT_THROW(simulate(sc.w0, sc.v0, f, 0.05, o), RunawayError);
}

TEST(Run, TerminationBoundsAndMonotoneCounts) {
    const FluxSpec f = quadratic_coupled();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Scenario sc = random_scenario(seed, 30, 5, 0.05, f.box);
        RunOptions o;
        o.keep_states = true;
        const Trajectory t = simulate(sc.w0, sc.v0, f, 0.05, o);
        // each v-front crosses each wave at most once
        std::size_t transversal_waves = 0;
        for (const Event& ev : t.events)
            if (ev.kind == EventKind::transversal) transversal_waves += ev.meeting.size();
        EXPECT_LE(transversal_waves, sc.w0.total_variation() * t.initial.v_fronts.size());
        for (std::size_t j = 1; j < t.events.size(); ++j) EXPECT_GE(t.events[j].time, t.events[j - 1].time);
        for (std::size_t j = 0; j < t.events.size(); ++j) {
            const std::size_t before = j == 0 ? t.initial.alive_count() : t.states[j].alive_count();
            const std::size_t after = t.states[j + 1].alive_count();
            if (t.events[j].kind == EventKind::cancellation)
                EXPECT_LT(after, before);
            else
                EXPECT_EQ(after, before);
        }
        EXPECT_TRUE(t.report.passed());
    }
}

TEST(Run, GoldenEventCount) {
    const FluxSpec f = quadratic_coupled();
    const Scenario sc = random_scenario(42, 20, 3, 0.05, f.box);
    EXPECT_EQ(sc.w0.total_variation(), 20);
    EXPECT_EQ(initial_enumeration(sc.w0, sc.v0, 0.05).v_fronts.size(), 3u);
    RunOptions o;
    o.level = CheckLevel::full;
    const Trajectory t = simulate(sc.w0, sc.v0, f, 0.05, o);
    EXPECT_TRUE(t.report.passed());
    EXPECT_EQ(t.events.size(), kGoldenSeed42Events);
}
