#pragma once

#include <cstdint>
#include <string>

#include "tsr/search.hpp"

namespace tsr {

enum class Algorithm { Ppo, Grpo };

inline const char* to_string(Algorithm a) { return a == Algorithm::Ppo ? "ppo" : "grpo"; }

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "ppo") return Algorithm::Ppo;
    if (s == "grpo") return Algorithm::Grpo;
    throw ConfigError("unknown algorithm: " + s);
}

// Flat key = value run configuration. '#' starts a comment, blank lines are
// skipped, unknown keys are errors. save_config/parse_config round-trip.
struct RunConfig {
    std::string env = "frozenlake";  // frozenlake | sokoban | minishop
    Algorithm algorithm = Algorithm::Grpo;

    Strategy strategy = Strategy::Naive;
    int iterations = 200;
    int tasks_per_iteration = 16;  // P
    int group_size = 8;            // L
    int horizon = 5;               // K
    int best_of = 16;              // N
    int expansion = 4;             // M
    int beam_width = 2;            // B
    int lookahead_depth = 2;       // D
    double temperature = 1.0;
    double eval_temperature = 0.5;
    bool bon_rank_by_score = false;

    double retain_ratio = 0.25;
    std::uint64_t root_seed = 1;
    int validation_tasks = 256;
    int eval_every = 50;
    int threads = 1;

    double learning_rate = 1e-2;
    double entropy_coef = 0.001;
    double clip_low = 0.2;
    double clip_high = 0.28;
    double value_coef = 0.5;
    double gae_gamma = 1.0;
    double gae_lambda = 1.0;
    double norm_eps = 1e-8;
    int minibatch_turns = 0;

    bool log_wall_clock = true;
    bool dump_rollouts = false;
    std::string out_dir;

    int sokoban_width = 5;
    int sokoban_height = 5;
    int sokoban_boxes = 1;
    int sokoban_pulls = 4;

    int lake_size = 4;
    double lake_hole_density = 0.25;
    double lake_hole_penalty = 10.0;
    int lake_min_start_dist = 2;
    int lake_max_start_dist = 4;

    int shop_catalog = 200;
    double shop_alpha = 1.0;
    double shop_beta = 1.0;

    int ablate_seeds = 3;
    int plot_window = 10;

    SearchConfig search_config() const {
        SearchConfig s;
        s.strategy = strategy;
        s.group_size = group_size;
        s.horizon = horizon;
        s.best_of = best_of;
        s.expansion = expansion;
        s.beam_width = beam_width;
        s.lookahead_depth = lookahead_depth;
        s.temperature = temperature;
        s.bon_rank_by_score = bon_rank_by_score;
        return s;
    }
};

void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string save_config(const RunConfig& cfg);

// throws ConfigError on out-of-range values
void validate_config(const RunConfig& cfg);

}  // namespace tsr
