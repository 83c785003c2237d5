#include <random>

#include <gtest/gtest.h>

#include "wavefront/simulator.hpp"
#include "wavefront/wavefield.hpp"

using namespace wavefront;

namespace {

StepFunction step(GridIndex left, std::vector<std::pair<double, GridIndex>> jumps) {
    StepFunction f;
    f.left_value = left;
    for (auto [x, v] : jumps) f.jumps.push_back({x, v});
    return f;
}

// Independent construction of the initial positions from the total variation function:
// wave s sits at inf{x : eps*s <= W(x)}.
std::vector<double> positions_from_variation(const StepFunction& w0) {
    std::vector<double> out;
    GridIndex prev = w0.left_value;
    for (const auto& j : w0.jumps) {
        for (GridIndex k = 0; k < std::abs(j.value - prev); ++k) out.push_back(j.x);
        prev = j.value;
    }
    return out;
}

StepFunction random_datum(std::mt19937_64& rng, int jumps, GridIndex amplitude) {
    std::uniform_int_distribution<GridIndex> level(-amplitude, amplitude);
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    StepFunction f;
    double x = 0.0;
    GridIndex prev = 0;
    for (int k = 0; k < jumps; ++k) {
        GridIndex next = level(rng);
        if (next == prev) next = prev + 1;
        x += gap(rng);
        f.jumps.push_back({x, next});
        prev = next;
    }
    x += gap(rng);
    if (prev != 0) f.jumps.push_back({x, 0});
    return f;
}

}  // namespace

TEST(InitialEnumeration, TwoUnitJumps) {
    const FieldState s = initial_enumeration(step(0, {{0.0, 1}, {1.0, 0}}), StepFunction{}, 0.05);
    ASSERT_EQ(s.waves.size(), 2u);
    EXPECT_EQ(s.waves[0].position, 0.0);
    EXPECT_EQ(s.waves[0].sign, 1);
    EXPECT_EQ(s.waves[0].right_state, 1);
    EXPECT_EQ(s.waves[1].position, 1.0);
    EXPECT_EQ(s.waves[1].sign, -1);
    EXPECT_EQ(s.waves[1].right_state, 0);
    EXPECT_TRUE(validate_enumeration(s).ok());
}

TEST(InitialEnumeration, MonotoneStaircaseStacksAtOnePoint) {
    const FieldState s = initial_enumeration(step(0, {{0.0, 3}}), StepFunction{}, 0.1);
    ASSERT_EQ(s.waves.size(), 3u);
    for (GridIndex k = 0; k < 3; ++k) {
        EXPECT_EQ(s.waves[static_cast<std::size_t>(k)].position, 0.0);
        EXPECT_EQ(s.waves[static_cast<std::size_t>(k)].right_state, k + 1);
    }
    ASSERT_EQ(s.fronts.size(), 1u);
    EXPECT_EQ(s.fronts[0].waves, (std::vector<WaveId>{1, 2, 3}));
}

TEST(InitialEnumeration, RandomDataRoundTrips) {
    std::mt19937_64 rng(31);
    for (int n = 0; n < 200; ++n) {
        const StepFunction w0 = random_datum(rng, 20, 8);
        const FieldState s = initial_enumeration(w0, StepFunction{}, 0.05);
        EXPECT_TRUE(validate_enumeration(s).ok());
        EXPECT_EQ(reconstruct_profile(s), normalized(w0));
        EXPECT_TRUE(push_forward_holds(s));
        EXPECT_EQ(static_cast<GridIndex>(s.waves.size()), w0.total_variation());
        const auto xs = positions_from_variation(w0);
        ASSERT_EQ(xs.size(), s.waves.size());
        for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(s.waves[i].position, xs[i]);
        // right states: w0(x-) + sign * (s - W(x-)/eps)
        GridIndex before = 0, w_left = w0.left_value;
        std::size_t i = 0;
        for (const auto& j : w0.jumps) {
            const GridIndex d = j.value - w_left;
            for (GridIndex k = 1; k <= std::abs(d); ++k, ++i)
                EXPECT_EQ(s.waves[i].right_state, w_left + sign_of(d) * (static_cast<GridIndex>(i) + 1 - before));
            before += std::abs(d);
            w_left = j.value;
        }
    }
}

TEST(InitialEnumeration, VFrontsPrecedeWaveFrontsAtSharedPoint) {
    const FieldState s = initial_enumeration(step(0, {{1.0, 2}, {3.0, 0}}), step(0, {{1.0, 4}, {2.0, 0}}), 0.05);
    ASSERT_EQ(s.fronts.size(), 4u);
    EXPECT_EQ(s.fronts[0].family, Family::first);
    EXPECT_EQ(s.fronts[1].family, Family::second);
    EXPECT_EQ(s.v_fronts.size(), 2u);
    EXPECT_EQ(s.region_v()[1], 4);
    EXPECT_TRUE(validate_enumeration(s).ok());
}

TEST(InitialEnumeration, OffGridValueIsContractViolation) {
    EXPECT_THROW(to_grid(0.0501, 0.05), ContractViolation);
    EXPECT_EQ(to_grid(-0.15, 0.05), -3);
    StepFunction unordered = step(0, {{2.0, 1}, {1.0, 0}});
    EXPECT_THROW(initial_enumeration(unordered, StepFunction{}, 0.05), ContractViolation);
}

TEST(AssignSpeeds, SingleWaveFrontUsesChord) {
    const FluxSpec f = quartic();
    const FieldState s = initial_enumeration(step(0, {{0.0, 1}}), StepFunction{}, 0.05);
    const auto speeds = assign_speeds(s, 0, f);
    ASSERT_EQ(speeds.size(), 1u);
    EXPECT_NEAR(speeds[0], (f.eval(0.05, 0.0) - f.eval(0.0, 0.0)) / 0.05, 1e-14);
}

TEST(AssignSpeeds, ShockFrontSharesRhSpeed) {
    const FluxSpec f = quadratic_coupled();
    const FieldState s = initial_enumeration(step(4, {{0.0, -3}}), StepFunction{}, 0.05);
    const auto speeds = assign_speeds(s, 0, f);
    const double rh = (f.eval(-0.15, 0) - f.eval(0.2, 0)) / (-0.35);
    for (double sp : speeds) EXPECT_NEAR(sp, rh, 1e-14);
}

TEST(AssignSpeeds, ConvexRarefactionGivesIncreasingCellSlopes) {
    const FluxSpec f = quadratic_coupled();
    const FieldState s = initial_enumeration(step(0, {{0.0, 3}}), step(0, {{-1.0, 2}}), 0.05);
    const auto speeds = assign_speeds(s, 1, f);
    ASSERT_EQ(speeds.size(), 3u);
    const double v = 0.1;
    for (int k = 0; k < 3; ++k) {
        const double a = 0.05 * k, b = a + 0.05;
        EXPECT_NEAR(speeds[static_cast<std::size_t>(k)], (f.eval(b, v) - f.eval(a, v)) / 0.05, 1e-14);
    }
    EXPECT_LT(speeds[0], speeds[1]);
    EXPECT_LT(speeds[1], speeds[2]);
}

TEST(AssignSpeeds, MixedSignFrontIsContractViolation) {
    FieldState s = initial_enumeration(step(0, {{0.0, 2}}), StepFunction{}, 0.05);
    s.waves[1].sign = -1;
    EXPECT_THROW(assign_speeds(s, 0, quadratic_coupled()), ContractViolation);
}

TEST(ValidateEnumeration, FlagsSwappedStack) {
    FieldState s = initial_enumeration(step(0, {{0.0, 3}}), StepFunction{}, 0.05);
    std::swap(s.waves[0].right_state, s.waves[2].right_state);
    EXPECT_FALSE(validate_enumeration(s).ok());
}

TEST(ValidateEnumeration, FlagsOtherCorruptions) {
    const FieldState good = initial_enumeration(step(0, {{0.0, 2}, {1.0, 0}}), StepFunction{}, 0.05);
    FieldState s = good;
    s.waves[0].alive = false;
    EXPECT_FALSE(validate_enumeration(s).ok());
    s = good;
    s.waves[3].position = 1.5;
    EXPECT_FALSE(validate_enumeration(s).ok());
    s = good;
    std::swap(s.fronts[0], s.fronts[1]);
    EXPECT_FALSE(validate_enumeration(s).ok());
}

TEST(ReconstructProfile, UnchangedByTransversalCrossing) {
    const FluxSpec f = quadratic_coupled();
    FieldState s = initialize(step(0, {{1.0, 2}}), step(0, {{2.0, 3}}), f, 0.05);
    const auto c = next_collision(s);
    ASSERT_TRUE(c.has_value());
    advance(s, c->time);
    const StepFunction before = reconstruct_profile(s);
    resolve(*c, s, f);
    const StepFunction after = reconstruct_profile(s);
    EXPECT_EQ(after.left_value, before.left_value);
    ASSERT_EQ(after.jumps.size(), before.jumps.size());
    for (std::size_t i = 0; i < after.jumps.size(); ++i) {
        EXPECT_EQ(after.jumps[i].value, before.jumps[i].value);
        EXPECT_NEAR(after.jumps[i].x, before.jumps[i].x, 1e-9);
    }
}

TEST(ReconstructProfile, TotalVariationIsAliveCount) {
    const FluxSpec f = quadratic_coupled();
    std::mt19937_64 rng(32);
    for (int n = 0; n < 20; ++n) {
        FieldState s = initialize(random_datum(rng, 8, 10), StepFunction{}, f, 0.05);
        while (auto c = next_collision(s)) {
            resolve(*c, s, f);
            EXPECT_EQ(reconstruct_profile(s).total_variation(), static_cast<GridIndex>(s.alive_count()));
            EXPECT_TRUE(validate_enumeration(s).ok());
        }
    }
}

TEST(MaximalBlocks, SplitBySign) {
    const FieldState s = initial_enumeration(step(0, {{0.0, 2}, {1.0, 0}, {2.0, 1}}), StepFunction{}, 0.05);
    const auto blocks = maximal_blocks(s);
    ASSERT_EQ(blocks.size(), 3u);
    EXPECT_EQ(blocks[0], (std::vector<WaveId>{1, 2}));
    EXPECT_EQ(blocks[1], (std::vector<WaveId>{3, 4}));
    EXPECT_EQ(blocks[2], (std::vector<WaveId>{5}));
}
