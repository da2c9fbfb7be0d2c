#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "tsr/policy.hpp"
#include "tsr/rng.hpp"
#include "tsr/trajectory.hpp"

// Rollout strategies over any environment E that provides:
//   E::State       value type with members `status` and `stream`
//   E::StepResult  { double reward; StepStatus status; }
//   spec(), reset(seed), step(State&, action), featurize(State),
//   and optionally action_mask(State).
//
// Stream discipline (all derivations use rng::derive):
//   task_seed -> layout / transition / action-sampling roots (rng::domain)
//   rollout unit r: env stream = derive(transition_root, r),
//                   action stream = derive(action_root, r)
//   each turn, candidate j of an entry steps a copy of the entry state on
//   env branch j and continues with action stream derive(parent_action, j);
//   a lookahead continuation runs on scratch branch index M of its child.
// A trajectory is therefore a pure function of (task_seed, branch indices),
// and a naive rollout is exactly the M = 1, B = 1 beam path.

namespace tsr {

enum class Strategy { Naive, BestOfN, Beam, Lookahead };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::Naive: return "naive";
        case Strategy::BestOfN: return "best_of_n";
        case Strategy::Beam: return "beam";
        case Strategy::Lookahead: return "lookahead";
    }
    return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
    if (s == "naive") return Strategy::Naive;
    if (s == "best_of_n") return Strategy::BestOfN;
    if (s == "beam") return Strategy::Beam;
    if (s == "lookahead") return Strategy::Lookahead;
    throw ConfigError("unknown strategy: " + s);
}

struct SearchConfig {
    Strategy strategy = Strategy::Naive;
    int group_size = 8;       // L, trajectories returned per task
    int horizon = 5;          // K, committed turns per trajectory
    int best_of = 16;         // N, full rollouts for best-of-n
    int expansion = 4;        // M, sampled candidates per alive beam
    int beam_width = 2;       // B, children kept per turn
    int lookahead_depth = 2;  // D, simulated turns per candidate
    double temperature = 1.0;
    bool bon_rank_by_score = false;  // rank best-of-n by score sum instead of return
};

template <class E>
using ScoreFn = std::function<double(const typename E::State& before, int action,
                                     const typename E::State& after,
                                     const typename E::StepResult& result)>;

template <class E>
ScoreFn<E> env_score_fn(const E& env) {
    return [&env](const typename E::State& before, int action, const typename E::State& after,
                  const typename E::StepResult& result) {
        return env.turn_score(before, action, after, result);
    };
}

// Per-expansion record of every child the beam considered, for oracle
// checks against brute-force top-B selection.
struct BeamTrace {
    struct Child {
        int instance = 0;
        int turn = 0;
        int parent = 0;
        int candidate = 0;
        int action = 0;
        double acc_score = 0.0;
        double rank_score = 0.0;
        bool done = false;
        bool kept = false;
    };
    std::vector<std::vector<Child>> expansions;  // one vector per (instance, turn)
};

namespace detail {

template <class E>
ActionMask mask_of(const E& env, const typename E::State& s) {
    if constexpr (requires { env.action_mask(s); }) {
        return env.action_mask(s);
    } else {
        (void)env;
        (void)s;
        return {};
    }
}

inline Terminal to_terminal(StepStatus st) {
    switch (st) {
        case StepStatus::Success: return Terminal::Success;
        case StepStatus::Failure: return Terminal::Failure;
        case StepStatus::Ongoing: return Terminal::Truncated;
    }
    return Terminal::Truncated;
}

template <class E>
void check_config(const E& env, const SearchConfig& cfg, const ScoreFn<E>* score) {
    if (cfg.group_size < 1) throw ConfigError("search: group_size must be >= 1");
    if (cfg.horizon < 1) throw ConfigError("search: horizon must be >= 1");
    if (!(cfg.temperature > 0.0)) throw ConfigError("search: temperature must be positive");
    bool needs_score = cfg.strategy == Strategy::Beam || cfg.strategy == Strategy::Lookahead ||
                       (cfg.strategy == Strategy::BestOfN && cfg.bon_rank_by_score);
    if (needs_score && (score == nullptr || !*score))
        throw ConfigError("search: strategy requires a score function");
    if (cfg.strategy == Strategy::BestOfN && cfg.best_of < cfg.group_size)
        throw ConfigError("search: best_of must be >= group_size");
    if (cfg.strategy == Strategy::Beam || cfg.strategy == Strategy::Lookahead) {
        if (cfg.expansion < 1) throw ConfigError("search: expansion must be >= 1");
        if (cfg.beam_width < 1) throw ConfigError("search: beam_width must be >= 1");
    }
    if (cfg.strategy == Strategy::Lookahead && cfg.lookahead_depth < 0)
        throw ConfigError("search: lookahead_depth must be >= 0");
    (void)env;
}

}  // namespace detail

template <class E>
std::vector<ActionSample> sample_candidates(const PolicyParams& params,
                                            const std::vector<double>& features,
                                            const ActionMask& mask, int count,
                                            double temperature, rng::Stream& stream) {
    std::vector<ActionSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j)
        out.push_back(sample_action(params, features, mask, temperature, stream));
    return out;
}

// One rollout following the uniform stepping discipline: a chain of
// first-candidate expansions. `score` may be null, in which case
// turn_score stays 0.
template <class E>
Trajectory rollout_single(const E& env, const PolicyParams& params, std::uint64_t task_id,
                          std::uint64_t seed, int rollout_index, const SearchConfig& cfg,
                          const ScoreFn<E>* score) {
    typename E::State state = env.reset(seed);
    state.stream = state.stream.branch(static_cast<std::uint64_t>(rollout_index));
    rng::Stream astream(
        rng::derive(rng::derive(seed, rng::domain::kAction), static_cast<std::uint64_t>(rollout_index)));

    Trajectory traj;
    traj.task_id = task_id;
    traj.seed = seed;
    for (int t = 0; t < cfg.horizon && state.status == StepStatus::Ongoing; ++t) {
        auto features = env.featurize(state);
        auto mask = detail::mask_of(env, state);
        ActionSample pick = sample_action(params, features, mask, cfg.temperature, astream);

        typename E::State next = state;
        next.stream = state.stream.branch(0);
        auto res = env.step(next, pick.action);

        TurnRecord turn;
        turn.action = pick.action;
        turn.features = std::move(features);
        turn.mask = std::move(mask);
        turn.reward = res.reward;
        turn.log_prob = pick.log_prob;
        turn.turn_score = (score && *score) ? (*score)(state, pick.action, next, res) : 0.0;
        traj.turns.push_back(std::move(turn));
        traj.return_value += res.reward;

        state = std::move(next);
        astream = rng::Stream(rng::derive(astream.id(), 0));
    }
    traj.terminal = detail::to_terminal(state.status);
    return traj;
}

template <class E>
GroupResult rollout_naive(const E& env, const PolicyParams& params, std::uint64_t task_id,
                          std::uint64_t seed, const SearchConfig& cfg) {
    GroupResult group;
    group.task_id = task_id;
    group.seed = seed;
    for (int i = 0; i < cfg.group_size; ++i)
        group.trajectories.push_back(rollout_single(env, params, task_id, seed, i, cfg,
                                                    static_cast<const ScoreFn<E>*>(nullptr)));
    return group;
}

template <class E>
GroupResult rollout_best_of_n(const E& env, const PolicyParams& params, std::uint64_t task_id,
                              std::uint64_t seed, const SearchConfig& cfg,
                              const ScoreFn<E>* score) {
    std::vector<Trajectory> all;
    all.reserve(static_cast<std::size_t>(cfg.best_of));
    const ScoreFn<E>* rollout_score = cfg.bon_rank_by_score ? score : nullptr;
    for (int i = 0; i < cfg.best_of; ++i)
        all.push_back(rollout_single(env, params, task_id, seed, i, cfg, rollout_score));

    std::vector<int> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int i) {
        const Trajectory& t = all[static_cast<std::size_t>(i)];
        return cfg.bon_rank_by_score ? t.score_sum() : t.return_value;
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        double ka = key(a), kb = key(b);
        if (ka != kb) return ka > kb;
        return a < b;  // ties by rollout index
    });

    GroupResult group;
    group.task_id = task_id;
    group.seed = seed;
    for (int i = 0; i < cfg.group_size; ++i)
        group.trajectories.push_back(std::move(all[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]));
    return group;
}

namespace detail {

// scores a D-step policy-sampled continuation on scratch branches; the
// simulated turns are discarded
template <class E>
double lookahead_bonus(const E& env, const PolicyParams& params, const typename E::State& child,
                       std::uint64_t child_astream_id, const SearchConfig& cfg,
                       const ScoreFn<E>& score) {
    typename E::State scratch = child;
    scratch.stream = child.stream.branch(static_cast<std::uint64_t>(cfg.expansion));
    rng::Stream astream(
        rng::derive(child_astream_id, static_cast<std::uint64_t>(cfg.expansion)));

    double bonus = 0.0;
    for (int d = 0; d < cfg.lookahead_depth && scratch.status == StepStatus::Ongoing; ++d) {
        auto features = env.featurize(scratch);
        auto mask = mask_of(env, scratch);
        ActionSample pick = sample_action(params, features, mask, cfg.temperature, astream);
        typename E::State before = scratch;
        auto res = env.step(scratch, pick.action);
        bonus += score(before, pick.action, scratch, res);
    }
    return bonus;
}

template <class E>
struct BeamEntry {
    typename E::State state;
    rng::Stream astream;
    Trajectory prefix;
    double acc = 0.0;  // sum of prefix turn scores
};

// One beam instance; returns finished-then-truncated trajectories in
// deterministic order.
template <class E>
std::vector<Trajectory> run_beam_instance(const E& env, const PolicyParams& params,
                                          std::uint64_t task_id, std::uint64_t seed, int instance,
                                          const SearchConfig& cfg, const ScoreFn<E>& score,
                                          bool lookahead, BeamTrace* trace) {
    BeamEntry<E> root;
    root.state = env.reset(seed);
    root.state.stream = root.state.stream.branch(static_cast<std::uint64_t>(instance));
    root.astream = rng::Stream(
        rng::derive(rng::derive(seed, rng::domain::kAction), static_cast<std::uint64_t>(instance)));
    root.prefix.task_id = task_id;
    root.prefix.seed = seed;

    std::vector<Trajectory> outputs;
    if (root.state.status != StepStatus::Ongoing) {
        root.prefix.terminal = to_terminal(root.state.status);
        outputs.push_back(std::move(root.prefix));
        return outputs;
    }

    std::vector<BeamEntry<E>> active;
    active.push_back(std::move(root));

    for (int t = 0; t < cfg.horizon && !active.empty(); ++t) {
        struct Child {
            BeamEntry<E> entry;
            int parent;
            int candidate;
            int action;
            double rank;
            bool done;
        };
        std::vector<Child> children;
        children.reserve(active.size() * static_cast<std::size_t>(cfg.expansion));

        for (std::size_t bi = 0; bi < active.size(); ++bi) {
            BeamEntry<E>& e = active[bi];
            auto features = env.featurize(e.state);
            auto mask = mask_of(env, e.state);
            auto candidates = sample_candidates<E>(params, features, mask, cfg.expansion,
                                                   cfg.temperature, e.astream);
            for (int j = 0; j < cfg.expansion; ++j) {
                const ActionSample& pick = candidates[static_cast<std::size_t>(j)];
                Child c;
                c.parent = static_cast<int>(bi);
                c.candidate = j;
                c.action = pick.action;
                c.entry.state = e.state;
                c.entry.state.stream = e.state.stream.branch(static_cast<std::uint64_t>(j));
                auto res = env.step(c.entry.state, pick.action);
                double s = score(e.state, pick.action, c.entry.state, res);

                c.entry.astream =
                    rng::Stream(rng::derive(e.astream.id(), static_cast<std::uint64_t>(j)));
                c.entry.prefix = e.prefix;
                TurnRecord turn;
                turn.action = pick.action;
                turn.features = features;
                turn.mask = mask;
                turn.reward = res.reward;
                turn.log_prob = pick.log_prob;
                turn.turn_score = s;
                c.entry.prefix.turns.push_back(std::move(turn));
                c.entry.prefix.return_value += res.reward;
                c.entry.acc = e.acc + s;
                c.done = c.entry.state.status != StepStatus::Ongoing;
                c.rank = c.entry.acc;
                if (lookahead && !c.done && cfg.lookahead_depth > 0)
                    c.rank += lookahead_bonus(env, params, c.entry.state, c.entry.astream.id(),
                                              cfg, score);
                children.push_back(std::move(c));
            }
        }

        std::vector<int> order(children.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const Child& ca = children[static_cast<std::size_t>(a)];
            const Child& cb = children[static_cast<std::size_t>(b)];
            if (ca.rank != cb.rank) return ca.rank > cb.rank;
            if (ca.parent != cb.parent) return ca.parent < cb.parent;
            return ca.candidate < cb.candidate;
        });

        std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(cfg.beam_width),
                                                 children.size());
        if (trace) {
            std::vector<BeamTrace::Child> row;
            row.reserve(children.size());
            for (const Child& c : children)
                row.push_back({instance, t, c.parent, c.candidate, c.action, c.entry.acc,
                               c.rank, c.done, false});
            for (std::size_t k = 0; k < keep; ++k)
                row[static_cast<std::size_t>(order[k])].kept = true;
            trace->expansions.push_back(std::move(row));
        }

        std::vector<BeamEntry<E>> next_active;
        for (std::size_t k = 0; k < keep; ++k) {
            Child& c = children[static_cast<std::size_t>(order[k])];
            if (c.done) {
                c.entry.prefix.terminal = to_terminal(c.entry.state.status);
                outputs.push_back(std::move(c.entry.prefix));  // frozen, kept as-is
            } else {
                next_active.push_back(std::move(c.entry));
            }
        }
        active = std::move(next_active);
    }

    for (BeamEntry<E>& e : active) {
        e.prefix.terminal = Terminal::Truncated;
        outputs.push_back(std::move(e.prefix));
    }
    return outputs;
}

}  // namespace detail

template <class E>
GroupResult rollout_beam(const E& env, const PolicyParams& params, std::uint64_t task_id,
                         std::uint64_t seed, const SearchConfig& cfg, const ScoreFn<E>& score,
                         bool lookahead, BeamTrace* trace = nullptr) {
    int base_instances =
        (cfg.group_size + cfg.beam_width - 1) / cfg.beam_width;  // ceil(L / B)

    struct Pooled {
        Trajectory traj;
        double acc;
        int instance;
        int order;
    };
    std::vector<Pooled> pool;

    int instance = 0;
    while (instance < base_instances ||
           static_cast<int>(pool.size()) < cfg.group_size) {
        auto outputs = detail::run_beam_instance(env, params, task_id, seed, instance, cfg,
                                                 score, lookahead, trace);
        for (std::size_t o = 0; o < outputs.size(); ++o) {
            double acc = outputs[o].score_sum();
            pool.push_back({std::move(outputs[o]), acc, instance, static_cast<int>(o)});
        }
        ++instance;
    }

    std::stable_sort(pool.begin(), pool.end(), [](const Pooled& a, const Pooled& b) {
        if (a.acc != b.acc) return a.acc > b.acc;
        if (a.instance != b.instance) return a.instance < b.instance;
        return a.order < b.order;
    });

    GroupResult group;
    group.task_id = task_id;
    group.seed = seed;
    for (int i = 0; i < cfg.group_size; ++i)
        group.trajectories.push_back(std::move(pool[static_cast<std::size_t>(i)].traj));
    return group;
}

template <class E>
GroupResult generate_group(const E& env, const PolicyParams& params, std::uint64_t task_id,
                           std::uint64_t seed, const SearchConfig& cfg,
                           const ScoreFn<E>* score = nullptr, BeamTrace* trace = nullptr) {
    detail::check_config(env, cfg, score);
    GroupResult group;
    switch (cfg.strategy) {
        case Strategy::Naive:
            group = rollout_naive(env, params, task_id, seed, cfg);
            break;
        case Strategy::BestOfN:
            group = rollout_best_of_n(env, params, task_id, seed, cfg, score);
            break;
        case Strategy::Beam:
            group = rollout_beam(env, params, task_id, seed, cfg, *score, false, trace);
            break;
        case Strategy::Lookahead:
            group = rollout_beam(env, params, task_id, seed, cfg, *score, true, trace);
            break;
    }
    if (static_cast<int>(group.trajectories.size()) != cfg.group_size)
        throw ContractViolation("search: group size contract broken");
    return group;
}

}  // namespace tsr
