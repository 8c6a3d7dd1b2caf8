#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "factoredq/envs.hpp"
#include "oracles.hpp"

using namespace factoredq;

namespace {

std::size_t bits_set(const State& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), 1.0)); }

std::size_t set_index(const State& s) {
    return static_cast<std::size_t>(std::find(s.begin(), s.end(), 1.0) - s.begin());
}

ActionVector blocker_action(int m0, int m1, int m2) {
    ActionVector a(12);
    a[0 + m0] = 1;
    a[4 + m1] = 1;
    a[8 + m2] = 1;
    return a;
}

constexpr int N = 0, S = 1, E = 2, W = 3;

}  // namespace

TEST(Maze, FortySevenFreeCellsAndFourteenStepOptimum) {
    EXPECT_EQ(Maze::free_cells, 47U);
    EXPECT_EQ(oracle::maze_shortest_path(), 14);
    std::set<std::size_t> seen;
    for (int r = 0; r < Maze::rows; ++r) {
        for (int c = 0; c < Maze::cols; ++c) {
            if (Maze::is_free({r, c})) seen.insert(Maze::state_index({r, c}));
        }
    }
    EXPECT_EQ(seen.size(), 47U);
    EXPECT_EQ(*seen.rbegin(), 46U);
}

TEST(GridWorldEnv, ResetIsOneHotAtStart) {
    std::mt19937_64 rng(51);
    for (GridCoding c : {GridCoding::one_hot, GridCoding::binary4, GridCoding::population}) {
        GridWorld env(c);
        const State s = env.reset(rng);
        ASSERT_EQ(s.size(), 47U);
        EXPECT_EQ(bits_set(s), 1U);
        EXPECT_EQ(set_index(s), Maze::state_index(Maze::start));
    }
}

TEST(GridWorldEnv, NorthMovesUp) {
    std::mt19937_64 rng(52);
    GridWorld env(GridCoding::one_hot);
    env.reset(rng);
    env.set_position({3, 0});
    const StepResult r = env.step(ActionVector{1, 0, 0, 0}, rng);
    EXPECT_EQ(env.position(), (GridPos{2, 0}));
    EXPECT_EQ(r.reward, -1.0);
    EXPECT_FALSE(r.terminal);
    EXPECT_EQ(set_index(r.next_state), Maze::state_index({2, 0}));
}

TEST(GridWorldEnv, BlockedMovesStayPut) {
    std::mt19937_64 rng(53);
    GridWorld env(GridCoding::one_hot);
    env.reset(rng);
    env.set_position({2, 1});  // obstacle to the east at (2,2)
    StepResult r = env.step(ActionVector{0, 0, 1, 0}, rng);
    EXPECT_EQ(env.position(), (GridPos{2, 1}));
    EXPECT_EQ(r.reward, -1.0);
    env.set_position({0, 0});  // wall to the north
    r = env.step(ActionVector{1, 0, 0, 0}, rng);
    EXPECT_EQ(env.position(), (GridPos{0, 0}));
    EXPECT_EQ(r.reward, -1.0);
}

TEST(GridWorldEnv, ReachingGoalIsTerminalWithZeroReward) {
    std::mt19937_64 rng(54);
    GridWorld env(GridCoding::one_hot);
    env.reset(rng);
    env.set_position({1, 8});
    const StepResult r = env.step(ActionVector{1, 0, 0, 0}, rng);
    EXPECT_TRUE(r.terminal);
    EXPECT_FALSE(r.truncated);
    EXPECT_EQ(r.reward, 0.0);
    EXPECT_THROW(env.step(ActionVector{1, 0, 0, 0}, rng), std::logic_error);
}

TEST(GridWorldEnv, TruncatesAtCap) {
    std::mt19937_64 rng(55);
    GridWorld env(GridCoding::binary4);
    env.reset(rng);
    StepResult r;
    for (std::size_t t = 0; t < GridWorld::kEpisodeCap; ++t) {
        ASSERT_FALSE(r.truncated);
        r = env.step(ActionVector{0, 0, 0, 0}, rng);
    }
    EXPECT_TRUE(r.truncated);
    EXPECT_FALSE(r.terminal);
    EXPECT_EQ(env.steps(), 800U);
}

TEST(GridWorldEnv, FourteenStepRouteBelowTheWall) {
    std::mt19937_64 rng(56);
    GridWorld env(GridCoding::binary4);
    env.reset(rng);
    const ActionVector north{1, 1, 0, 0}, east{1, 0, 1, 0}, south{0, 0, 1, 1};
    // Down under the column-2 wall, along row 3, then up the east edge.
    const std::vector<ActionVector> route{south, south, east, east, east, north, east,
                                          east,  east,  east, east, north, north, north};
    StepResult r;
    for (const auto& a : route) {
        ASSERT_FALSE(r.terminal);
        r = env.step(a, rng);
    }
    EXPECT_TRUE(r.terminal);
    EXPECT_EQ(env.steps(), static_cast<std::size_t>(oracle::maze_shortest_path()));
}

TEST(DecodeBinary4, TableEntries) {
    EXPECT_EQ(decode_binary4(ActionVector{1, 1, 0, 0}), Move::North);
    EXPECT_EQ(decode_binary4(ActionVector{0, 0, 1, 1}), Move::South);
    EXPECT_EQ(decode_binary4(ActionVector{1, 0, 1, 0}), Move::East);
    EXPECT_EQ(decode_binary4(ActionVector{0, 1, 0, 1}), Move::West);
    EXPECT_EQ(decode_binary4(ActionVector{0, 0, 0, 0}), Move::Stay);
    int moving = 0;
    for (const auto& a : std::vector<ActionVector>{
             {0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 1, 1}, {0, 1, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 1, 1, 1},
             {1, 0, 0, 0}, {1, 0, 0, 1}, {1, 0, 1, 0}, {1, 0, 1, 1}, {1, 1, 0, 0}, {1, 1, 0, 1}, {1, 1, 1, 0}, {1, 1, 1, 1}}) {
        moving += decode_binary4(a) != Move::Stay;
    }
    EXPECT_EQ(moving, 4);
    EXPECT_THROW(decode_binary4(ActionVector{1, 1, 0}), std::invalid_argument);
}

TEST(PopulationCoding, WorkedExamples) {
    ActionVector a(40);
    EXPECT_EQ(population_move_probs(a), (std::array<double, 5>{0, 0, 0, 0, 1}));
    for (std::size_t i = 0; i < 10; ++i) a[i] = 1;
    EXPECT_EQ(population_move_probs(a), (std::array<double, 5>{1, 0, 0, 0, 0}));
    ActionVector half(40);
    for (std::size_t i = 0; i < 5; ++i) half[i] = 1;
    EXPECT_EQ(population_move_probs(half), (std::array<double, 5>{0.5, 0, 0, 0, 0.5}));
    EXPECT_THROW(population_move_probs(ActionVector(39)), std::invalid_argument);
}

TEST(PopulationCoding, RandomActionsGiveDistributions) {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 10000; ++trial) {
        ActionVector a(40);
        const double density = std::uniform_real_distribution<double>(0, 1)(rng);
        for (std::size_t i = 0; i < 40; ++i) a[i] = std::bernoulli_distribution(density)(rng);
        const auto p = population_move_probs(a);
        double total = 0.0;
        for (double v : p) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
            total += v;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(PopulationCoding, EnvironmentMoveFrequenciesMatch) {
    std::mt19937_64 rng(58);
    GridWorld env(GridCoding::population);
    ActionVector a(40);
    for (std::size_t i : {0, 1, 2, 10, 20, 21, 30}) a[i] = 1;  // E = (3,1,2,1), Stay = 3
    const auto p = population_move_probs(a);
    std::array<double, 5> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[static_cast<int>(env.decode(a, rng))] += 1.0;
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(counts[j] / n, p[j], 0.01);
}

TEST(BlockerEnvTest, ResetEncoding) {
    std::mt19937_64 rng(59);
    BlockerEnv env;
    for (int i = 0; i < 100000; ++i) {
        const State s = env.reset(rng);
        ASSERT_EQ(s.size(), 141U);
        ASSERT_EQ(bits_set(s), 6U);
        ASSERT_EQ(s.back(), 1.0);
        const auto& pos = env.positions();
        ASSERT_EQ(pos.agents[0].row, BlockerBoard::start_row);
        ASSERT_NE(pos.agents[0].col, pos.agents[1].col);
        ASSERT_NE(pos.agents[0].col, pos.agents[2].col);
        ASSERT_NE(pos.agents[1].col, pos.agents[2].col);
    }
}

TEST(BlockerEnvTest, EastmostEncoding) {
    BlockerPositions p;
    p.agents = {GridPos{3, 0}, GridPos{3, 1}, GridPos{3, 2}};
    p.blocker_left = {0, 4};
    const State s = encode_blocker_state(p);
    EXPECT_EQ(s[3 * 28 + 2], 1.0);      // blocker 0 spans cols 0-2
    EXPECT_EQ(s[4 * 28 + 6], 1.0);      // blocker 1 spans cols 4-6
    EXPECT_EQ(s[0 * 28 + 3 * 7 + 0], 1.0);
    EXPECT_EQ(s[2 * 28 + 3 * 7 + 2], 1.0);
    p.agents[1] = p.agents[0];
    EXPECT_THROW(encode_blocker_state(p), std::invalid_argument);
}

TEST(BlockerStep, LowerIndexAgentWinsConflicts) {
    BlockerPositions p;
    p.agents = {GridPos{3, 1}, GridPos{3, 3}, GridPos{3, 5}};
    // Agents 0 and 1 both target (3,2).
    blocker_step(p, blocker_action(E, W, N));
    EXPECT_EQ(p.agents[0], (GridPos{3, 2}));
    EXPECT_EQ(p.agents[1], (GridPos{3, 3}));
    EXPECT_EQ(p.agents[2], (GridPos{2, 5}));
}

TEST(BlockerStep, EnteringUncoveredEndZoneWins) {
    BlockerPositions p;
    p.agents = {GridPos{1, 3}, GridPos{3, 0}, GridPos{3, 6}};
    p.blocker_left = {0, 4};
    const BlockerOutcome o = blocker_step(p, blocker_action(N, S, S));
    EXPECT_TRUE(o.terminal);
    EXPECT_EQ(o.reward, 1.0);
    EXPECT_EQ(p.agents[0], (GridPos{0, 3}));
}

TEST(BlockerStep, BlockerCellsAreImpassable) {
    BlockerPositions p;
    p.agents = {GridPos{1, 1}, GridPos{3, 3}, GridPos{3, 6}};
    p.blocker_left = {0, 4};
    const BlockerOutcome o = blocker_step(p, blocker_action(N, S, S));
    EXPECT_FALSE(o.terminal);
    EXPECT_EQ(o.reward, -1.0);
    EXPECT_EQ(p.agents[0], (GridPos{1, 1}));
}

TEST(BlockerStep, BlockerSlidesTowardThreat) {
    BlockerPositions p;
    p.agents = {GridPos{2, 3}, GridPos{3, 0}, GridPos{3, 6}};
    p.blocker_left = {0, 4};
    blocker_step(p, blocker_action(N, S, S));  // agent 0 moves to (1,3)
    // Blocker 0 (cols 0-2) shifts east to cover col 3; blocker 1 cannot follow.
    EXPECT_EQ(p.blocker_left[0], 1);
    EXPECT_EQ(p.blocker_left[1], 4);
    // With col 3 covered, agent 0 cannot enter.
    const BlockerOutcome o = blocker_step(p, blocker_action(N, S, S));
    EXPECT_FALSE(o.terminal);
    EXPECT_EQ(p.agents[0], (GridPos{1, 3}));
}

TEST(BlockerStep, NoThreatNoMovement) {
    BlockerPositions p;
    p.agents = {GridPos{3, 3}, GridPos{2, 0}, GridPos{3, 6}};
    p.blocker_left = {0, 4};
    blocker_step(p, blocker_action(W, E, E));
    EXPECT_EQ(p.blocker_left, (std::array<int, 2>{0, 4}));
}

TEST(BlockerStep, RandomPlayKeepsInvariants) {
    std::mt19937_64 rng(60);
    BlockerEnv env;
    const ActionSpace space = env.spec().action_space;
    std::uniform_int_distribution<int> mv(0, 3);
    for (int episode = 0; episode < 2000; ++episode) {
        env.reset(rng);
        StepResult r;
        while (!r.terminal && !r.truncated) {
            r = env.step(blocker_action(mv(rng), mv(rng), mv(rng)), rng);
            const auto& p = env.positions();
            ASSERT_TRUE(p.valid());
            ASSERT_EQ(bits_set(r.next_state), 6U);
            ASSERT_FALSE(r.terminal && r.truncated);
            if (r.terminal) {
                ASSERT_TRUE(p.agent_in_end_zone());
                ASSERT_EQ(r.reward, 1.0);
            } else {
                ASSERT_EQ(r.reward, -1.0);
            }
        }
        ASSERT_LE(env.steps(), BlockerEnv::kEpisodeCap);
    }
    (void)space;
}

TEST(BlockerStep, RejectsInvalidAction) {
    BlockerPositions p;
    p.agents = {GridPos{3, 0}, GridPos{3, 1}, GridPos{3, 2}};
    EXPECT_THROW(blocker_step(p, ActionVector(12)), std::invalid_argument);
}

TEST(Environments, FactoryNamesAndSpecs) {
    EXPECT_EQ(std::get<GridWorld>(make_environment("grid-onehot")).spec().action_space, ActionSpace::one_hot(4));
    EXPECT_EQ(std::get<GridWorld>(make_environment("grid-binary4")).spec().action_space, ActionSpace::binary(4));
    EXPECT_EQ(std::get<GridWorld>(make_environment("grid-population")).spec().action_space, ActionSpace::binary(40));
    const EnvSpec b = std::get<BlockerEnv>(make_environment("blocker")).spec();
    EXPECT_EQ(b.state_dim, 141U);
    EXPECT_EQ(b.episode_cap, 40U);
    EXPECT_EQ(b.action_space, ActionSpace::factored({4, 4, 4}));
    EXPECT_THROW(make_environment("cartpole"), std::invalid_argument);
}
