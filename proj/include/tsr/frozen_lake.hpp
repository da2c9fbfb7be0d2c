#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsr/rng.hpp"
#include "tsr/trajectory.hpp"

namespace tsr {

// Slippery gridworld. Each step the intended move is taken with probability
// 1/3 and deviates to each perpendicular direction with probability 1/3;
// the move is never reversed. Stepping off the grid leaves the agent in
// place. Reward is +1 on reaching the goal, 0 otherwise; holes and the
// goal end the episode. Exactly one value is drawn from the state's rng
// stream per step.
class FrozenLakeEnv {
  public:
    static constexpr int kUp = 0;
    static constexpr int kDown = 1;
    static constexpr int kLeft = 2;
    static constexpr int kRight = 3;

    struct Config {
        int size = 4;
        double hole_density = 0.25;
        double hole_penalty = 10.0;  // score penalty weight for landing in a hole
        int horizon = 5;
        // start cells are sampled among safe cells in this Manhattan band
        // around the fixed bottom-right goal
        int min_start_dist = 2;
        int max_start_dist = 4;
    };

    struct Map {
        int size = 0;
        std::uint64_t holes = 0;
        int start = 0;
        int goal = 0;

        bool hole_at(int c) const { return (holes >> c) & 1u; }
        bool operator==(const Map&) const = default;
    };

    struct State {
        Map map;
        int agent = 0;
        StepStatus status = StepStatus::Ongoing;
        int steps = 0;
        rng::Stream stream;
    };

    struct StepResult {
        double reward = 0.0;
        StepStatus status = StepStatus::Ongoing;
    };

    FrozenLakeEnv() = default;
    explicit FrozenLakeEnv(const Config& cfg) : cfg_(cfg) {}

    const Config& config() const { return cfg_; }

    EnvSpec spec() const {
        return {4, cfg_.horizon, 2 * cfg_.size * cfg_.size, true};
    }

    State reset(std::uint64_t task_seed) const;
    StepResult step(State& s, int action) const;

    // agent one-hot over cells, then the hole mask
    std::vector<double> featurize(const State& s) const;

    // negative Manhattan distance to goal, minus a penalty when the realized
    // next cell is a hole
    double turn_score(const State& prev, int action, const State& next,
                      const StepResult& r) const;

    static int manhattan(const Map& m, int a, int b);
    static std::string render(const Map& m);
    static Map parse(const std::string& text);
    static Map generate(rng::Stream& stream, const Config& cfg);

  private:
    Config cfg_;
};

}  // namespace tsr
