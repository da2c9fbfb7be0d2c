#pragma once

#include <cstdint>
#include <vector>

#include "tsr/policy.hpp"
#include "tsr/rng.hpp"
#include "tsr/trajectory.hpp"

// Two policy updates over recorded trajectories.
//
// PPO: GAE advantages from the value head (terminal bootstrap 0), clipped
// surrogate with asymmetric clip range, entropy bonus, value MSE. Each
// trajectory's terms are averaged over its executed turns, trajectories
// are averaged over the batch.
//
// GRPO: per-group return normalization (population std + eps), the same
// normalized advantage broadcast to every turn, clipped surrogate and
// entropy bonus with 1/K_i then 1/L_g then batch-mean weighting. No value
// function, no reference-policy term of any kind.
//
// Both run a single optimization epoch over shuffled minibatches and
// report the l2 norm of the full-batch gradient taken before the first
// minibatch step. Advantages (and PPO value targets) are computed once
// from the parameters at entry and held fixed for the whole update.

namespace tsr {

struct PpoConfig {
    double clip_low = 0.2;    // ratio clipped to [1 - clip_low, 1 + clip_high]
    double clip_high = 0.28;
    double entropy_coef = 0.001;
    double value_coef = 0.5;
    double gae_gamma = 1.0;
    double gae_lambda = 1.0;
    double temperature = 1.0;  // must match the rollout temperature
    int minibatch_turns = 0;   // 0 = one full-batch minibatch
};

struct GrpoConfig {
    double clip_low = 0.2;
    double clip_high = 0.28;
    double entropy_coef = 0.001;
    double norm_eps = 1e-8;
    double temperature = 1.0;
    int minibatch_turns = 0;
};

struct UpdateStats {
    double grad_norm = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
};

// GAE over one episode; values[t] = V(s_t), bootstrap after the last
// reward is 0 regardless of how the episode ended
std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double gamma,
                                   double lambda);

// (R_i - mean) / (population std + eps)
std::vector<double> grpo_advantages(const std::vector<double>& returns, double eps);

// min(r * adv, clip(r, 1 - clip_low, 1 + clip_high) * adv)
double clipped_surrogate(double ratio, double advantage, double clip_low, double clip_high);

// Advantages and value targets prepared at the update's entry parameters;
// the loss below is a pure function of the parameters given this batch.
struct PpoBatch {
    std::vector<const Trajectory*> trajectories;
    std::vector<std::vector<double>> advantages;
    std::vector<std::vector<double>> targets;
};

PpoBatch prepare_ppo_batch(const PolicyParams& params, const std::vector<Trajectory>& batch,
                           const PpoConfig& cfg);
double ppo_loss(const PolicyParams& params, const PpoBatch& batch, const PpoConfig& cfg);
std::vector<double> ppo_grad(const PolicyParams& params, const PpoBatch& batch,
                             const PpoConfig& cfg);

UpdateStats ppo_update(PolicyParams& params, AdamState& adam, const AdamConfig& opt,
                       const std::vector<Trajectory>& batch, const PpoConfig& cfg,
                       rng::Stream& shuffle);

struct GrpoBatch {
    std::vector<const GroupResult*> groups;
    std::vector<std::vector<double>> advantages;  // per group, per trajectory
};

GrpoBatch prepare_grpo_batch(const std::vector<GroupResult>& groups, const GrpoConfig& cfg);
double grpo_loss(const PolicyParams& params, const GrpoBatch& batch, const GrpoConfig& cfg);
std::vector<double> grpo_grad(const PolicyParams& params, const GrpoBatch& batch,
                              const GrpoConfig& cfg);

UpdateStats grpo_update(PolicyParams& params, AdamState& adam, const AdamConfig& opt,
                        const std::vector<GroupResult>& groups, const GrpoConfig& cfg,
                        rng::Stream& shuffle);

}  // namespace tsr
