#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsr/rng.hpp"
#include "tsr/trajectory.hpp"

namespace tsr {

// Linear softmax policy over featurized observations, with an optional
// linear value head. All parameters live in one flat vector:
//   [action 0 row | action 1 row | ... | value row (if present)]
// each row being feature_dim wide. Sampling, log-probs and entropy are all
// computed under the same tempered distribution softmax(logits / T).
struct PolicyParams {
    int action_count = 0;
    int feature_dim = 0;
    bool has_value = false;
    std::vector<double> w;

    static PolicyParams zeros(int action_count, int feature_dim, bool has_value);

    std::size_t size() const { return w.size(); }
    const double* row(int action) const {
        return w.data() + static_cast<std::size_t>(action) * static_cast<std::size_t>(feature_dim);
    }
    const double* value_row() const {
        return w.data() + static_cast<std::size_t>(action_count) * static_cast<std::size_t>(feature_dim);
    }
};

// empty mask means every action is valid
using ActionMask = std::vector<bool>;

struct ActionSample {
    int action = 0;
    double log_prob = 0.0;
};

struct ActionDist {
    std::vector<double> probs;      // 0 for masked actions
    std::vector<double> log_probs;  // -inf for masked actions
};

std::vector<double> action_logits(const PolicyParams& p, const std::vector<double>& features);

ActionDist action_dist(const PolicyParams& p, const std::vector<double>& features,
                       const ActionMask& mask, double temperature);

ActionSample sample_action(const PolicyParams& p, const std::vector<double>& features,
                           const ActionMask& mask, double temperature, rng::Stream& stream);

double action_log_prob(const PolicyParams& p, const std::vector<double>& features,
                       const ActionMask& mask, double temperature, int action);

// gradient of log pi(action) w.r.t. the flat parameter vector; the value
// block, if any, is zero
std::vector<double> log_prob_grad(const PolicyParams& p, const std::vector<double>& features,
                                  const ActionMask& mask, double temperature, int action);

// Shannon entropy in nats of the tempered distribution
double policy_entropy(const PolicyParams& p, const std::vector<double>& features,
                      const ActionMask& mask, double temperature);

std::vector<double> entropy_grad(const PolicyParams& p, const std::vector<double>& features,
                                 const ActionMask& mask, double temperature);

double value_of(const PolicyParams& p, const std::vector<double>& features);

// gradient of V(features) w.r.t. the flat vector (zeros outside the value row)
std::vector<double> value_grad(const PolicyParams& p, const std::vector<double>& features);

struct AdamConfig {
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m, v;
    long step = 0;

    static AdamState zeros(std::size_t n) { return {std::vector<double>(n, 0.0),
                                                    std::vector<double>(n, 0.0), 0}; }
};

// one bias-corrected Adam step in place; throws NumericError on a
// non-finite gradient entry
void adam_update(PolicyParams& p, AdamState& state, const std::vector<double>& grad,
                 const AdamConfig& cfg);

double l2_norm(const std::vector<double>& v);

// versioned text checkpoint; doubles are written as hexfloats so the
// round-trip is bit exact
struct Checkpoint {
    PolicyParams params;
    AdamState adam;
    bool has_adam = false;
    std::string env_name;
    int iteration = 0;
    std::uint64_t root_seed = 0;
};

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& in);
void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace tsr
