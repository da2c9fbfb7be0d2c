#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tsr/config.hpp"
#include "tsr/metrics.hpp"
#include "tsr/policy.hpp"
#include "tsr/trajectory.hpp"

// The full training loop: per iteration, sample P task groups, run the
// configured rollout strategy on each, keep the most uncertain groups,
// apply one PPO/GRPO update, log metrics, and periodically evaluate on a
// held-out validation set. Training and validation task seeds come from
// distinct derivation domains of the root seed, so the two sets can never
// overlap. Everything is deterministic given the config, independent of
// the worker-pool size.

namespace tsr {

struct EvalResult {
    double success_rate = 0.0;
    double mean_turns = 0.0;
    double mean_actions = 0.0;
    double mean_return = 0.0;
};

struct TrainResult {
    Checkpoint checkpoint;  // final parameters + optimizer state
    std::vector<MetricRecord> metrics;
    EvalResult final_eval;
};

using MetricCallback = std::function<void(const MetricRecord&)>;

// Runs the loop; writes config.txt, metrics.txt, scheduled checkpoints and
// (optionally) rollouts.jsonl under cfg.out_dir when it is non-empty.
TrainResult run_training(const RunConfig& cfg, const MetricCallback& on_metric = {});

// One naive rollout per validation task at eval_temperature.
EvalResult evaluate_policy(const PolicyParams& params, const RunConfig& cfg);

// Same, after checking the checkpoint fits the configured environment.
EvalResult evaluate_checkpoint(const Checkpoint& ckpt, const RunConfig& cfg);

// Fresh naive rollouts from a checkpoint on the ad-hoc dump seed domain,
// scored with the environment's turn score.
std::vector<Trajectory> rollout_dump(const Checkpoint& ckpt, const RunConfig& cfg, int tasks);

// One sweep row per non-empty line: whitespace-separated key=value
// overrides applied on top of the base config. Exact duplicate rows
// collapse to one; an empty sweep is an error.
struct SweepRow {
    std::string label;
    std::vector<std::pair<std::string, std::string>> overrides;
};

std::vector<SweepRow> parse_sweep(const std::string& text);

struct AblationRow {
    std::string label;
    int seeds = 0;
    double success_mean = 0.0;
    double success_std = 0.0;  // population std over seeds
    double turns_mean = 0.0;
    double return_mean = 0.0;
};

using AblationCallback =
    std::function<void(const std::string& label, int seed_index, const EvalResult&)>;

// Trains every sweep row ablate_seeds times (root seeds base, base+1, ...)
// and averages the final validation metrics.
std::vector<AblationRow> run_ablation(const RunConfig& base, const std::string& sweep_text,
                                      const AblationCallback& progress = {});

std::string format_ablation_table(const std::vector<AblationRow>& rows);

// One TSV series per metric (iteration, value, trailing-window mean) plus a
// self-contained SVG chart; returns the series names written.
std::vector<std::string> emit_plots(const std::vector<MetricRecord>& metrics,
                                    const std::string& out_dir, int window);

}  // namespace tsr
