#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsr/rng.hpp"
#include "tsr/trajectory.hpp"

namespace tsr {

// Grid sokoban on boards of at most 64 cells. Cell sets are bitmasks,
// the agent is a cell index. Rewards are delta-based per step:
//   +1 per box newly on a target, -1 per box newly off, +10 when all
//   boxes are on targets after the step, -0.1 per step always.
// Blocked pushes and wall bumps are no-op moves that still cost -0.1.
class SokobanEnv {
  public:
    // actions
    static constexpr int kUp = 0;
    static constexpr int kDown = 1;
    static constexpr int kLeft = 2;
    static constexpr int kRight = 3;

    struct Config {
        int width = 5;
        int height = 5;
        int num_boxes = 1;
        int pull_steps = 4;  // reverse-play depth; 0 yields a solved board
        int horizon = 5;
    };

    struct Board {
        int width = 0;
        int height = 0;
        std::uint64_t walls = 0;
        std::uint64_t boxes = 0;
        std::uint64_t targets = 0;
        int agent = 0;

        int cell(int row, int col) const { return row * width + col; }
        bool wall_at(int c) const { return (walls >> c) & 1u; }
        bool box_at(int c) const { return (boxes >> c) & 1u; }
        bool target_at(int c) const { return (targets >> c) & 1u; }

        bool operator==(const Board&) const = default;
    };

    struct State {
        Board board;
        StepStatus status = StepStatus::Ongoing;
        int steps = 0;
        rng::Stream stream;  // unused by the deterministic dynamics; kept for branching
    };

    struct StepResult {
        double reward = 0.0;
        StepStatus status = StepStatus::Ongoing;
    };

    SokobanEnv() = default;
    explicit SokobanEnv(const Config& cfg) : cfg_(cfg) {}

    const Config& config() const { return cfg_; }

    EnvSpec spec() const {
        return {4, cfg_.horizon, cfg_.width * cfg_.height * 4, false};
    }

    State reset(std::uint64_t task_seed) const;
    StepResult step(State& s, int action) const;
    std::vector<double> featurize(const State& s) const;

    double turn_score(const State& prev, int action, const State& next,
                      const StepResult& r) const {
        (void)prev;
        (void)action;
        (void)next;
        return r.reward;
    }

    // true only when the board is provably lost: some off-target box has a
    // wall on two orthogonally adjacent sides. Boxes on targets never count.
    static bool is_deadlocked(const Board& b);
    static bool is_solved(const Board& b) { return (b.boxes & ~b.targets) == 0; }

    static std::string render(const Board& b);
    static Board parse(const std::string& text);

    // Reverse-play generation: start from a solved board, apply random walks
    // and pulls. Every output is solvable by replaying the moves forward.
    static Board generate(rng::Stream& stream, const Config& cfg);

    // Fixed 5x5 regression fixture: a pillar next to the right wall makes
    // the obvious "push right" move trap the box off-target.
    static Board pillar_trap_board();

  private:
    Config cfg_;
};

}  // namespace tsr
