#ifndef FACTOREDQ_ENVS_HPP
#define FACTOREDQ_ENVS_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "factoredq/action_space.hpp"

namespace factoredq {

using State = std::vector<double>;

struct EnvSpec {
    std::size_t state_dim;
    ActionSpace action_space;
    std::size_t episode_cap;
};

struct StepResult {
    State next_state;
    double reward = 0.0;
    bool terminal = false;
    bool truncated = false;
};

struct GridPos {
    int row = 0;
    int col = 0;

    friend bool operator==(const GridPos&, const GridPos&) = default;
};

enum class Move { North, South, East, West, Stay };

inline GridPos shifted(GridPos p, Move m) {
    switch (m) {
        case Move::North: --p.row; break;
        case Move::South: ++p.row; break;
        case Move::East: ++p.col; break;
        case Move::West: --p.col; break;
        case Move::Stay: break;
    }
    return p;
}

/// Table lookup for 4-bit actions; the 12 unlisted patterns mean Stay.
inline Move decode_binary4(const ActionVector& a) {
    if (a.size() != 4) throw std::invalid_argument("decode_binary4 expects a 4-bit action");
    const auto& b = a.bits();
    if (b == std::vector<std::uint8_t>{1, 1, 0, 0}) return Move::North;
    if (b == std::vector<std::uint8_t>{0, 0, 1, 1}) return Move::South;
    if (b == std::vector<std::uint8_t>{1, 0, 1, 0}) return Move::East;
    if (b == std::vector<std::uint8_t>{0, 1, 0, 1}) return Move::West;
    return Move::Stay;
}

inline constexpr std::size_t kPopulationBits = 40;
inline constexpr std::size_t kPopulationGroup = 10;

/// Move probabilities (North, South, East, West, Stay) for a 40-bit
/// population-coded action. Each direction's weight is the count of set bits
/// in its 10-bit block; Stay gets whatever is left of 10, floored at 0.
inline std::array<double, 5> population_move_probs(const ActionVector& a) {
    if (a.size() != kPopulationBits) throw std::invalid_argument("population_move_probs expects a 40-bit action");
    std::array<double, 5> e{};
    for (std::size_t i = 0; i < kPopulationBits; ++i) e[i / kPopulationGroup] += a[i];
    const double votes = e[0] + e[1] + e[2] + e[3];
    e[4] = std::max(static_cast<double>(kPopulationGroup) - votes, 0.0);
    const double total = votes + e[4];
    for (double& v : e) v /= total;
    return e;
}

// ---------------------------------------------------------------------------
// Maze grid world

enum class GridCoding { one_hot, binary4, population };

/// 6 x 9 maze with 7 obstacle cells and 47 free cells. State is one-hot over
/// free cells ranked in row-major order.
struct Maze {
    static constexpr int rows = 6;
    static constexpr int cols = 9;
    static constexpr std::array<GridPos, 7> obstacles{{{1, 2}, {2, 2}, {3, 2}, {4, 5}, {0, 7}, {1, 7}, {2, 7}}};
    static constexpr GridPos start{2, 0};
    static constexpr GridPos goal{0, 8};
    static constexpr std::size_t free_cells = rows * cols - obstacles.size();

    static bool in_bounds(GridPos p) { return p.row >= 0 && p.row < rows && p.col >= 0 && p.col < cols; }

    static bool is_obstacle(GridPos p) {
        return std::find(obstacles.begin(), obstacles.end(), p) != obstacles.end();
    }

    static bool is_free(GridPos p) { return in_bounds(p) && !is_obstacle(p); }

    static std::size_t state_index(GridPos p) {
        if (!is_free(p)) throw std::invalid_argument("state_index: not a free maze cell");
        std::size_t idx = 0;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const GridPos q{r, c};
                if (q == p) return idx;
                if (!is_obstacle(q)) ++idx;
            }
        }
        return idx;
    }
};

class GridWorld {
public:
    static constexpr std::size_t kEpisodeCap = 800;

    explicit GridWorld(GridCoding coding) : coding_(coding) {}

    GridCoding coding() const { return coding_; }

    EnvSpec spec() const {
        switch (coding_) {
            case GridCoding::one_hot: return {Maze::free_cells, ActionSpace::one_hot(4), kEpisodeCap};
            case GridCoding::binary4: return {Maze::free_cells, ActionSpace::binary(4), kEpisodeCap};
            case GridCoding::population: return {Maze::free_cells, ActionSpace::binary(kPopulationBits), kEpisodeCap};
        }
        throw std::logic_error("unhandled grid coding");
    }

    template <class Rng>
    State reset(Rng&) {
        pos_ = Maze::start;
        steps_ = 0;
        done_ = false;
        return encode();
    }

    template <class Rng>
    StepResult step(const ActionVector& a, Rng& rng) {
        if (done_) throw std::logic_error("GridWorld::step called after the episode ended");
        const Move m = decode(a, rng);
        const GridPos next = shifted(pos_, m);
        if (Maze::is_free(next)) pos_ = next;
        ++steps_;

        StepResult r;
        r.terminal = pos_ == Maze::goal;
        r.reward = r.terminal ? 0.0 : -1.0;
        r.truncated = !r.terminal && steps_ >= kEpisodeCap;
        r.next_state = encode();
        done_ = r.terminal || r.truncated;
        return r;
    }

    GridPos position() const { return pos_; }
    void set_position(GridPos p) {
        if (!Maze::is_free(p)) throw std::invalid_argument("set_position: not a free maze cell");
        pos_ = p;
    }
    std::size_t steps() const { return steps_; }

    template <class Rng>
    Move decode(const ActionVector& a, Rng& rng) const {
        switch (coding_) {
            case GridCoding::one_hot: {
                const ActionSpace space = ActionSpace::one_hot(4);
                space.require_valid(a);
                // Bit order North, South, East, West.
                for (std::size_t i = 0; i < 4; ++i) {
                    if (a[i]) return static_cast<Move>(i);
                }
                break;
            }
            case GridCoding::binary4: return decode_binary4(a);
            case GridCoding::population: {
                const auto p = population_move_probs(a);
                std::discrete_distribution<int> pick(p.begin(), p.end());
                return static_cast<Move>(pick(rng));
            }
        }
        throw std::logic_error("unreachable action decode");
    }

private:
    State encode() const {
        State s(Maze::free_cells, 0.0);
        s[Maze::state_index(pos_)] = 1.0;
        return s;
    }

    GridCoding coding_;
    GridPos pos_ = Maze::start;
    std::size_t steps_ = 0;
    bool done_ = false;
};

// ---------------------------------------------------------------------------
// Blocker

/// Geometry of the cooperative blocker task: a 4 x 7 board whose top row is
/// the end-zone, three agents, and two 1 x 3 blockers patrolling the end-zone.
struct BlockerBoard {
    static constexpr int rows = 4;
    static constexpr int cols = 7;
    static constexpr int end_zone_row = 0;
    static constexpr int threat_row = 1;
    static constexpr int start_row = rows - 1;
    static constexpr int blocker_width = 3;
    static constexpr std::size_t n_agents = 3;
    static constexpr std::size_t n_blockers = 2;
    static constexpr std::size_t cells = rows * cols;
    static constexpr std::size_t state_dim = cells * (n_agents + n_blockers) + 1;
    static constexpr std::array<int, n_blockers> initial_spans{0, 4};

    static std::size_t cell_index(GridPos p) { return static_cast<std::size_t>(p.row * cols + p.col); }
    static bool in_bounds(GridPos p) { return p.row >= 0 && p.row < rows && p.col >= 0 && p.col < cols; }
};

/// Agent cells plus the westernmost column of each blocker span.
struct BlockerPositions {
    std::array<GridPos, BlockerBoard::n_agents> agents{};
    std::array<int, BlockerBoard::n_blockers> blocker_left{BlockerBoard::initial_spans};

    bool covered_by_blocker(GridPos p) const {
        if (p.row != BlockerBoard::end_zone_row) return false;
        return std::any_of(blocker_left.begin(), blocker_left.end(), [&](int left) {
            return p.col >= left && p.col < left + BlockerBoard::blocker_width;
        });
    }

    bool occupied_by_agent(GridPos p) const {
        return std::find(agents.begin(), agents.end(), p) != agents.end();
    }

    bool valid() const {
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (!BlockerBoard::in_bounds(agents[i]) || covered_by_blocker(agents[i])) return false;
            for (std::size_t j = i + 1; j < agents.size(); ++j) {
                if (agents[i] == agents[j]) return false;
            }
        }
        for (int left : blocker_left) {
            if (left < 0 || left + BlockerBoard::blocker_width > BlockerBoard::cols) return false;
        }
        const int a = std::min(blocker_left[0], blocker_left[1]);
        const int b = std::max(blocker_left[0], blocker_left[1]);
        return a + BlockerBoard::blocker_width <= b;
    }

    bool agent_in_end_zone() const {
        return std::any_of(agents.begin(), agents.end(),
                           [](GridPos p) { return p.row == BlockerBoard::end_zone_row; });
    }

    friend bool operator==(const BlockerPositions&, const BlockerPositions&) = default;
};

/// [agent0 | agent1 | agent2 | blocker0 east end | blocker1 east end | bias],
/// each block one-hot over the 28 cells in row-major order.
inline State encode_blocker_state(const BlockerPositions& pos) {
    if (!pos.valid()) throw std::invalid_argument("encode_blocker_state: invalid positions");
    State s(BlockerBoard::state_dim, 0.0);
    std::size_t block = 0;
    for (GridPos a : pos.agents) s[block++ * BlockerBoard::cells + BlockerBoard::cell_index(a)] = 1.0;
    for (int left : pos.blocker_left) {
        const GridPos east{BlockerBoard::end_zone_row, left + BlockerBoard::blocker_width - 1};
        s[block++ * BlockerBoard::cells + BlockerBoard::cell_index(east)] = 1.0;
    }
    s.back() = 1.0;
    return s;
}

struct BlockerOutcome {
    double reward;
    bool terminal;
};

namespace detail {

inline int span_distance(int left, int col) {
    if (col < left) return left - col;
    if (col >= left + BlockerBoard::blocker_width) return col - (left + BlockerBoard::blocker_width - 1);
    return 0;
}

// Each blocker slides one column toward the nearest agent standing just below
// the end-zone (ties to the west), unless that would leave the board or touch
// the other blocker.
inline void move_blockers(BlockerPositions& pos) {
    for (std::size_t b = 0; b < BlockerBoard::n_blockers; ++b) {
        const int left = pos.blocker_left[b];
        int target = -1;
        int best = BlockerBoard::cols + 1;
        for (GridPos a : pos.agents) {
            if (a.row != BlockerBoard::threat_row) continue;
            const int d = span_distance(left, a.col);
            if (d < best || (d == best && a.col < target)) {
                best = d;
                target = a.col;
            }
        }
        if (target < 0 || best == 0) continue;
        const int moved = target < left ? left - 1 : left + 1;
        if (moved < 0 || moved + BlockerBoard::blocker_width > BlockerBoard::cols) continue;
        const int other = pos.blocker_left[1 - b];
        const bool disjoint = moved + BlockerBoard::blocker_width <= other || other + BlockerBoard::blocker_width <= moved;
        if (disjoint) pos.blocker_left[b] = moved;
    }
}

}  // namespace detail

/// Applies one joint move for the three agents (in index order), then the
/// blockers' response. Reward +1 and terminal when an agent reaches the
/// end-zone, otherwise -1.
inline BlockerOutcome blocker_step(BlockerPositions& pos, const ActionVector& a) {
    static const ActionSpace space = ActionSpace::factored({4, 4, 4});
    space.require_valid(a);
    for (std::size_t agent = 0; agent < BlockerBoard::n_agents; ++agent) {
        Move m = Move::Stay;
        for (std::size_t i = 0; i < 4; ++i) {
            if (a[agent * 4 + i]) m = static_cast<Move>(i);
        }
        const GridPos target = shifted(pos.agents[agent], m);
        if (!BlockerBoard::in_bounds(target) || pos.occupied_by_agent(target) || pos.covered_by_blocker(target)) {
            continue;
        }
        pos.agents[agent] = target;
    }
    if (pos.agent_in_end_zone()) return {1.0, true};
    detail::move_blockers(pos);
    return {-1.0, false};
}

class BlockerEnv {
public:
    static constexpr std::size_t kEpisodeCap = 40;

    EnvSpec spec() const { return {BlockerBoard::state_dim, ActionSpace::factored({4, 4, 4}), kEpisodeCap}; }

    /// Agents on distinct random columns of the bottom row; blockers at their
    /// initial spans.
    template <class Rng>
    State reset(Rng& rng) {
        std::array<int, BlockerBoard::cols> columns{};
        std::iota(columns.begin(), columns.end(), 0);
        for (std::size_t i = 0; i < BlockerBoard::n_agents; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, columns.size() - 1);
            std::swap(columns[i], columns[pick(rng)]);
            pos_.agents[i] = {BlockerBoard::start_row, columns[i]};
        }
        pos_.blocker_left = BlockerBoard::initial_spans;
        steps_ = 0;
        done_ = false;
        return encode_blocker_state(pos_);
    }

    template <class Rng>
    StepResult step(const ActionVector& a, Rng&) {
        if (done_) throw std::logic_error("BlockerEnv::step called after the episode ended");
        const BlockerOutcome o = blocker_step(pos_, a);
        ++steps_;
        StepResult r;
        r.reward = o.reward;
        r.terminal = o.terminal;
        r.truncated = !o.terminal && steps_ >= kEpisodeCap;
        r.next_state = encode_blocker_state(pos_);
        done_ = r.terminal || r.truncated;
        return r;
    }

    const BlockerPositions& positions() const { return pos_; }
    void set_positions(const BlockerPositions& p) {
        if (!p.valid()) throw std::invalid_argument("set_positions: invalid blocker configuration");
        pos_ = p;
    }
    std::size_t steps() const { return steps_; }

private:
    BlockerPositions pos_;
    std::size_t steps_ = 0;
    bool done_ = false;
};

using Environment = std::variant<GridWorld, BlockerEnv>;

inline constexpr std::array<std::string_view, 4> kEnvironmentNames{"grid-onehot", "grid-binary4", "grid-population",
                                                                   "blocker"};

inline Environment make_environment(std::string_view name) {
    if (name == "grid-onehot") return GridWorld(GridCoding::one_hot);
    if (name == "grid-binary4") return GridWorld(GridCoding::binary4);
    if (name == "grid-population") return GridWorld(GridCoding::population);
    if (name == "blocker") return BlockerEnv{};
    throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

}  // namespace factoredq

#endif  // FACTOREDQ_ENVS_HPP
