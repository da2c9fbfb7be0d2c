#include "tsr/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsr {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

void check_clip(double clip_low, double clip_high, double temperature) {
    if (!(clip_low >= 0.0) || clip_low >= 1.0)
        throw ConfigError("optimizer: clip_low must be in [0, 1)");
    if (!(clip_high >= 0.0)) throw ConfigError("optimizer: clip_high must be >= 0");
    if (!(temperature > 0.0)) throw ConfigError("optimizer: temperature must be positive");
}

struct Accum {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    std::vector<double>* grad = nullptr;  // null when only the loss is needed
};

// One trajectory's contribution with per-turn advantages `adv`, optional
// value targets `tgt`, and outer weight `w` applied on top of the 1/K_i
// turn average. Loss terms and gradient go into `acc`.
void accumulate_trajectory(const PolicyParams& params, const Trajectory& traj,
                           const std::vector<double>& adv, const std::vector<double>* tgt,
                           double w, double clip_low, double clip_high, double entropy_coef,
                           double value_coef, double temperature, Accum& acc) {
    int turns = traj.num_turns();
    if (turns == 0) return;
    double wk = w / static_cast<double>(turns);

    for (int k = 0; k < turns; ++k) {
        const TurnRecord& turn = traj.turns[static_cast<std::size_t>(k)];
        ActionDist dist = action_dist(params, turn.features, turn.mask, temperature);

        double lp_new = dist.log_probs[static_cast<std::size_t>(turn.action)];
        double ratio = std::exp(lp_new - turn.log_prob);
        double a = adv[static_cast<std::size_t>(k)];
        double surr1 = ratio * a;
        double surr2 = clamp(ratio, 1.0 - clip_low, 1.0 + clip_high) * a;
        bool unclipped = surr1 <= surr2;

        double h = 0.0;
        for (int b = 0; b < params.action_count; ++b) {
            double pb = dist.probs[static_cast<std::size_t>(b)];
            if (pb > 0.0) h -= pb * dist.log_probs[static_cast<std::size_t>(b)];
        }

        acc.policy_loss += wk * -std::min(surr1, surr2);
        acc.entropy += wk * h;

        double v = 0.0, vdiff = 0.0;
        if (tgt) {
            v = value_of(params, turn.features);
            vdiff = v - (*tgt)[static_cast<std::size_t>(k)];
            acc.value_loss += wk * vdiff * vdiff;
        }

        if (!acc.grad) continue;
        std::vector<double>& g = *acc.grad;
        for (int b = 0; b < params.action_count; ++b) {
            double pb = dist.probs[static_cast<std::size_t>(b)];
            bool is_taken = b == turn.action;
            if (pb <= 0.0 && !is_taken) continue;
            double coef = 0.0;
            if (unclipped)
                coef += -a * ratio * ((is_taken ? 1.0 : 0.0) - pb) / temperature;
            if (pb > 0.0)
                coef += entropy_coef * pb *
                        (dist.log_probs[static_cast<std::size_t>(b)] + h) / temperature;
            if (coef == 0.0) continue;
            coef *= wk;
            double* row = g.data() +
                          static_cast<std::size_t>(b) * static_cast<std::size_t>(params.feature_dim);
            for (int f = 0; f < params.feature_dim; ++f)
                row[f] += coef * turn.features[static_cast<std::size_t>(f)];
        }
        if (tgt) {
            double coef = wk * value_coef * 2.0 * vdiff;
            double* row = g.data() + static_cast<std::size_t>(params.action_count) *
                                         static_cast<std::size_t>(params.feature_dim);
            for (int f = 0; f < params.feature_dim; ++f)
                row[f] += coef * turn.features[static_cast<std::size_t>(f)];
        }
    }
}

// shuffled unit order chunked so every chunk holds at least
// `minibatch_turns` turns (0 = everything in one chunk)
std::vector<std::vector<int>> make_chunks(const std::vector<int>& unit_turns,
                                          int minibatch_turns, rng::Stream& shuffle) {
    std::vector<int> order(unit_turns.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle.next_below(i)]);

    std::vector<std::vector<int>> chunks;
    std::vector<int> current;
    int turns = 0;
    for (int u : order) {
        current.push_back(u);
        turns += unit_turns[static_cast<std::size_t>(u)];
        if (minibatch_turns > 0 && turns >= minibatch_turns) {
            chunks.push_back(std::move(current));
            current.clear();
            turns = 0;
        }
    }
    if (!current.empty()) chunks.push_back(std::move(current));
    return chunks;
}

}  // namespace

std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double gamma,
                                   double lambda) {
    if (rewards.size() != values.size())
        throw ContractViolation("gae: rewards/values length mismatch");
    std::vector<double> adv(rewards.size(), 0.0);
    double gae = 0.0;
    for (std::size_t t = rewards.size(); t-- > 0;) {
        double v_next = t + 1 < rewards.size() ? values[t + 1] : 0.0;  // terminal bootstrap
        double delta = rewards[t] + gamma * v_next - values[t];
        gae = delta + gamma * lambda * gae;
        adv[t] = gae;
    }
    return adv;
}

std::vector<double> grpo_advantages(const std::vector<double>& returns, double eps) {
    if (returns.empty()) throw ContractViolation("grpo advantages of an empty group");
    double mean = std::accumulate(returns.begin(), returns.end(), 0.0) /
                  static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    var /= static_cast<double>(returns.size());
    double denom = std::sqrt(var) + eps;
    std::vector<double> adv;
    adv.reserve(returns.size());
    for (double r : returns) adv.push_back((r - mean) / denom);
    return adv;
}

double clipped_surrogate(double ratio, double advantage, double clip_low, double clip_high) {
    return std::min(ratio * advantage,
                    clamp(ratio, 1.0 - clip_low, 1.0 + clip_high) * advantage);
}

// -- ppo -- //

PpoBatch prepare_ppo_batch(const PolicyParams& params, const std::vector<Trajectory>& batch,
                           const PpoConfig& cfg) {
    if (!params.has_value) throw ConfigError("ppo: policy has no value head");
    check_clip(cfg.clip_low, cfg.clip_high, cfg.temperature);
    PpoBatch out;
    for (const Trajectory& traj : batch) {
        std::vector<double> rewards, values;
        for (const TurnRecord& turn : traj.turns) {
            rewards.push_back(turn.reward);
            values.push_back(value_of(params, turn.features));
        }
        auto adv = gae_advantages(rewards, values, cfg.gae_gamma, cfg.gae_lambda);
        std::vector<double> tgt(adv.size());
        for (std::size_t k = 0; k < adv.size(); ++k) tgt[k] = adv[k] + values[k];
        out.trajectories.push_back(&traj);
        out.advantages.push_back(std::move(adv));
        out.targets.push_back(std::move(tgt));
    }
    return out;
}

namespace {

Accum ppo_accumulate(const PolicyParams& params, const PpoBatch& batch,
                     const std::vector<int>& units, const PpoConfig& cfg,
                     std::vector<double>* grad) {
    Accum acc;
    acc.grad = grad;
    double w = units.empty() ? 0.0 : 1.0 / static_cast<double>(units.size());
    for (int u : units) {
        auto iu = static_cast<std::size_t>(u);
        accumulate_trajectory(params, *batch.trajectories[iu], batch.advantages[iu],
                              &batch.targets[iu], w, cfg.clip_low, cfg.clip_high,
                              cfg.entropy_coef, cfg.value_coef, cfg.temperature, acc);
    }
    return acc;
}

std::vector<int> all_units(std::size_t n) {
    std::vector<int> u(n);
    std::iota(u.begin(), u.end(), 0);
    return u;
}

}  // namespace

double ppo_loss(const PolicyParams& params, const PpoBatch& batch, const PpoConfig& cfg) {
    Accum acc = ppo_accumulate(params, batch, all_units(batch.trajectories.size()), cfg, nullptr);
    return acc.policy_loss - cfg.entropy_coef * acc.entropy + cfg.value_coef * acc.value_loss;
}

std::vector<double> ppo_grad(const PolicyParams& params, const PpoBatch& batch,
                             const PpoConfig& cfg) {
    std::vector<double> grad(params.size(), 0.0);
    ppo_accumulate(params, batch, all_units(batch.trajectories.size()), cfg, &grad);
    return grad;
}

UpdateStats ppo_update(PolicyParams& params, AdamState& adam, const AdamConfig& opt,
                       const std::vector<Trajectory>& batch, const PpoConfig& cfg,
                       rng::Stream& shuffle) {
    PpoBatch prepared = prepare_ppo_batch(params, batch, cfg);

    std::vector<double> full_grad(params.size(), 0.0);
    Accum acc = ppo_accumulate(params, prepared, all_units(batch.size()), cfg, &full_grad);

    UpdateStats stats;
    stats.grad_norm = l2_norm(full_grad);
    stats.policy_loss = acc.policy_loss;
    stats.value_loss = acc.value_loss;
    stats.entropy = acc.entropy;
    if (!std::isfinite(stats.policy_loss) || !std::isfinite(stats.value_loss) ||
        !std::isfinite(stats.entropy))
        throw NumericError("ppo: non-finite loss");

    std::vector<int> unit_turns;
    for (const Trajectory& t : batch) unit_turns.push_back(t.num_turns());
    auto chunks = make_chunks(unit_turns, cfg.minibatch_turns, shuffle);
    for (const auto& chunk : chunks) {
        std::vector<double> grad(params.size(), 0.0);
        ppo_accumulate(params, prepared, chunk, cfg, &grad);
        adam_update(params, adam, grad, opt);
    }
    return stats;
}

// -- grpo -- //

GrpoBatch prepare_grpo_batch(const std::vector<GroupResult>& groups, const GrpoConfig& cfg) {
    check_clip(cfg.clip_low, cfg.clip_high, cfg.temperature);
    GrpoBatch out;
    for (const GroupResult& g : groups) {
        if (g.trajectories.empty()) throw ContractViolation("grpo: empty group");
        out.groups.push_back(&g);
        out.advantages.push_back(grpo_advantages(g.returns(), cfg.norm_eps));
    }
    return out;
}

namespace {

Accum grpo_accumulate(const PolicyParams& params, const GrpoBatch& batch,
                      const std::vector<int>& units, const GrpoConfig& cfg,
                      std::vector<double>* grad) {
    Accum acc;
    acc.grad = grad;
    double w_batch = units.empty() ? 0.0 : 1.0 / static_cast<double>(units.size());
    for (int u : units) {
        auto iu = static_cast<std::size_t>(u);
        const GroupResult& group = *batch.groups[iu];
        double w_group = w_batch / static_cast<double>(group.trajectories.size());
        for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
            const Trajectory& traj = group.trajectories[i];
            std::vector<double> adv(static_cast<std::size_t>(traj.num_turns()),
                                    batch.advantages[iu][i]);
            accumulate_trajectory(params, traj, adv, nullptr, w_group, cfg.clip_low,
                                  cfg.clip_high, cfg.entropy_coef, 0.0, cfg.temperature, acc);
        }
    }
    return acc;
}

}  // namespace

double grpo_loss(const PolicyParams& params, const GrpoBatch& batch, const GrpoConfig& cfg) {
    Accum acc = grpo_accumulate(params, batch, all_units(batch.groups.size()), cfg, nullptr);
    return acc.policy_loss - cfg.entropy_coef * acc.entropy;
}

std::vector<double> grpo_grad(const PolicyParams& params, const GrpoBatch& batch,
                              const GrpoConfig& cfg) {
    std::vector<double> grad(params.size(), 0.0);
    grpo_accumulate(params, batch, all_units(batch.groups.size()), cfg, &grad);
    return grad;
}

UpdateStats grpo_update(PolicyParams& params, AdamState& adam, const AdamConfig& opt,
                        const std::vector<GroupResult>& groups, const GrpoConfig& cfg,
                        rng::Stream& shuffle) {
    GrpoBatch prepared = prepare_grpo_batch(groups, cfg);

    std::vector<double> full_grad(params.size(), 0.0);
    Accum acc = grpo_accumulate(params, prepared, all_units(groups.size()), cfg, &full_grad);

    UpdateStats stats;
    stats.grad_norm = l2_norm(full_grad);
    stats.policy_loss = acc.policy_loss;
    stats.entropy = acc.entropy;
    if (!std::isfinite(stats.policy_loss) || !std::isfinite(stats.entropy))
        throw NumericError("grpo: non-finite loss");

    std::vector<int> unit_turns;
    for (const GroupResult& g : groups) {
        int turns = 0;
        for (const Trajectory& t : g.trajectories) turns += t.num_turns();
        unit_turns.push_back(turns);
    }
    auto chunks = make_chunks(unit_turns, cfg.minibatch_turns, shuffle);
    for (const auto& chunk : chunks) {
        std::vector<double> grad(params.size(), 0.0);
        grpo_accumulate(params, prepared, chunk, cfg, &grad);
        adam_update(params, adam, grad, opt);
    }
    return stats;
}

}  // namespace tsr
