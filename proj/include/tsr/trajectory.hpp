#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Core episode types. Everything downstream of the environments (search,
// filtering, optimizers, trainer) works on these env-agnostic values.

namespace tsr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct EnvSpec {
    int action_count = 0;
    int horizon = 0;      // default episode turn limit
    int feature_dim = 0;
    bool is_stochastic = false;
};

enum class StepStatus { Ongoing, Success, Failure };

enum class Terminal { Success, Failure, Truncated };

inline const char* to_string(Terminal t) {
    switch (t) {
        case Terminal::Success: return "success";
        case Terminal::Failure: return "failure";
        case Terminal::Truncated: return "truncated";
    }
    return "?";
}

inline Terminal terminal_from_string(const std::string& s) {
    if (s == "success") return Terminal::Success;
    if (s == "failure") return Terminal::Failure;
    if (s == "truncated") return Terminal::Truncated;
    throw ConfigError("unknown terminal kind: " + s);
}

// One executed turn. `features` is the featurized observation the policy
// conditioned on when sampling `action`, `mask` the action mask in force
// (empty = all actions valid). `turn_score` is the per-turn search score;
// 0 for strategies that do not score turns.
struct TurnRecord {
    int action = 0;
    std::vector<double> features;
    std::vector<bool> mask;
    double reward = 0.0;
    double log_prob = 0.0;
    double turn_score = 0.0;
};

struct Trajectory {
    std::uint64_t task_id = 0;
    std::uint64_t seed = 0;
    std::vector<TurnRecord> turns;
    Terminal terminal = Terminal::Truncated;
    double return_value = 0.0;  // sum of turn rewards, in push order

    int num_turns() const { return static_cast<int>(turns.size()); }

    double score_sum() const {
        double s = 0.0;
        for (const auto& t : turns) s += t.turn_score;
        return s;
    }
};

// All trajectories generated for one task instance.
struct GroupResult {
    std::uint64_t task_id = 0;
    std::uint64_t seed = 0;
    std::vector<Trajectory> trajectories;

    std::vector<double> returns() const {
        std::vector<double> r;
        r.reserve(trajectories.size());
        for (const auto& t : trajectories) r.push_back(t.return_value);
        return r;
    }
};

}  // namespace tsr
