// Integration gate: one pass/fail line per criterion. Criteria can be
// selected by number on the command line (default: all). Exit status is
// nonzero when any selected criterion fails.
//
//   1  analytic gradients vs central differences
//   2  search/advantage/filter oracles
//   3  corner-trap fixture: beam rescues a push-right-biased policy
//   4  beam > filtering-only baseline on FrozenLake (5 seeds)
//   5  budget scaling: wider beams first, then more candidates
//   6  gradient-norm spikes and entropy decay over the criterion-4 runs
//   7  bitwise-identical metric logs across reruns and worker counts
//   8  count/contract suite incl. slip chi-square

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/finite_diff.hpp"
#include "tsr/filtering.hpp"
#include "tsr/frozen_lake.hpp"
#include "tsr/metrics.hpp"
#include "tsr/optimizers.hpp"
#include "tsr/search.hpp"
#include "tsr/serialize.hpp"
#include "tsr/sokoban.hpp"
#include "tsr/trainer.hpp"

using namespace tsr;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4) {
    std::ostringstream out;
    out.precision(prec);
    out << std::fixed << v;
    return out.str();
}

std::string sci(double v) {
    std::ostringstream out;
    out.precision(2);
    out << std::scientific << v;
    return out.str();
}

// ---------------------------------------------------------------------------
// criterion 1: gradients

struct SyntheticBatch {
    PolicyParams params;
    std::vector<Trajectory> trajectories;
};

// Random small trajectories whose stored log-probs sit away from the clip
// kinks, so central differences stay on one side of every min/max.
SyntheticBatch make_batch(std::mt19937_64& gen, int actions, int features, bool value_head,
                          double clip_low, double clip_high) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SyntheticBatch out;
    out.params = PolicyParams::zeros(actions, features, value_head);
    for (double& w : out.params.w) w = (unit(gen) - 0.5) * 1.4;

    int count = 2 + static_cast<int>(unit(gen) * 2.0);
    for (int i = 0; i < count; ++i) {
        Trajectory t;
        t.task_id = static_cast<std::uint64_t>(i);
        int turns = 1 + static_cast<int>(unit(gen) * 3.0);
        for (int k = 0; k < turns; ++k) {
            TurnRecord turn;
            turn.features.resize(static_cast<std::size_t>(features));
            for (double& f : turn.features) f = (unit(gen) - 0.5) * 3.0;
            if (unit(gen) < 0.3) {
                turn.mask.assign(static_cast<std::size_t>(actions), true);
                turn.mask[static_cast<std::size_t>(unit(gen) * actions) % actions] = false;
            }
            rng::Stream pick_stream(gen());
            ActionSample pick = sample_action(out.params, turn.features, turn.mask, 1.0,
                                              pick_stream);
            turn.action = pick.action;
            double noise = 0.0;
            for (int tries = 0; tries < 100; ++tries) {
                noise = (unit(gen) - 0.5) * 0.7;
                double ratio = std::exp(-noise);
                if (std::fabs(ratio - (1.0 - clip_low)) > 5e-3 &&
                    std::fabs(ratio - (1.0 + clip_high)) > 5e-3)
                    break;
            }
            turn.log_prob = pick.log_prob + noise;
            turn.reward = (unit(gen) - 0.5) * 2.0;
            t.return_value += turn.reward;
            t.turns.push_back(std::move(turn));
        }
        t.terminal = Terminal::Truncated;
        out.trajectories.push_back(std::move(t));
    }
    return out;
}

Outcome criterion_gradients() {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    int instances = 0;

    for (int trial = 0; trial < 60; ++trial) {
        PpoConfig cfg;
        if (trial % 3 == 0) {
            cfg.clip_low = 0.05;
            cfg.clip_high = 0.05;
        }
        cfg.gae_gamma = trial % 2 == 0 ? 1.0 : 0.9 + 0.1 * unit(gen);
        cfg.gae_lambda = trial % 4 < 2 ? 1.0 : unit(gen);
        SyntheticBatch b = make_batch(gen, 3, 5, true, cfg.clip_low, cfg.clip_high);
        PpoBatch prepared = prepare_ppo_batch(b.params, b.trajectories, cfg);
        std::vector<double> grad = ppo_grad(b.params, prepared, cfg);
        double err = testsupport::max_grad_error(
            [&](const PolicyParams& p) { return ppo_loss(p, prepared, cfg); }, b.params, grad);
        worst = std::max(worst, err);
        ++instances;
    }

    for (int trial = 0; trial < 60; ++trial) {
        GrpoConfig cfg;
        if (trial % 3 == 0) {
            cfg.clip_low = 0.05;
            cfg.clip_high = 0.05;
        }
        SyntheticBatch b = make_batch(gen, 4, 4, false, cfg.clip_low, cfg.clip_high);
        std::vector<GroupResult> groups;
        GroupResult g;
        g.trajectories = b.trajectories;
        groups.push_back(std::move(g));
        GrpoBatch prepared = prepare_grpo_batch(groups, cfg);
        std::vector<double> grad = grpo_grad(b.params, prepared, cfg);
        double err = testsupport::max_grad_error(
            [&](const PolicyParams& p) { return grpo_loss(p, prepared, cfg); }, b.params, grad);
        worst = std::max(worst, err);
        ++instances;
    }

    bool pass = worst < 1e-5 && instances >= 100;
    return {pass, std::to_string(instances) + " instances, max relative error " + sci(worst)};
}

// ---------------------------------------------------------------------------
// criterion 2: oracles

Outcome criterion_oracles() {
    std::mt19937_64 gen(22);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::ostringstream counts;

    // beam top-B selection vs full sort of every expansion row
    {
        FrozenLakeEnv env;
        int rows_checked = 0;
        for (int trial = 0; rows_checked < 1000; ++trial) {
            PolicyParams p = PolicyParams::zeros(4, 32, false);
            for (double& w : p.w) w = (unit(gen) - 0.5) * 2.0;
            SearchConfig cfg;
            cfg.strategy = trial % 2 == 0 ? Strategy::Beam : Strategy::Lookahead;
            cfg.group_size = 4;
            cfg.horizon = 4;
            cfg.expansion = 2 + trial % 3;
            cfg.beam_width = 1 + trial % 3;
            cfg.lookahead_depth = 1;
            ScoreFn<FrozenLakeEnv> score = env_score_fn(env);
            BeamTrace trace;
            generate_group(env, p, 0, rng::derive(77, static_cast<std::uint64_t>(trial)), cfg,
                           &score, &trace);
            for (const auto& row : trace.expansions) {
                std::vector<int> order(row.size());
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                    const auto& ca = row[static_cast<std::size_t>(a)];
                    const auto& cb = row[static_cast<std::size_t>(b)];
                    if (ca.rank_score != cb.rank_score) return ca.rank_score > cb.rank_score;
                    if (ca.parent != cb.parent) return ca.parent < cb.parent;
                    return ca.candidate < cb.candidate;
                });
                std::size_t keep = std::min<std::size_t>(
                    static_cast<std::size_t>(cfg.beam_width), row.size());
                for (std::size_t i = 0; i < row.size(); ++i) {
                    bool expect = false;
                    for (std::size_t k = 0; k < keep; ++k)
                        if (order[k] == static_cast<int>(i)) expect = true;
                    if (row[i].kept != expect)
                        return {false, "beam kept set diverged from sort oracle"};
                }
                ++rows_checked;
            }
        }
        counts << "beam rows " << rows_checked;
    }

    // best-of-n vs rebuilt rollouts + selection scan
    {
        FrozenLakeEnv env;
        ScoreFn<FrozenLakeEnv> score = env_score_fn(env);
        for (int trial = 0; trial < 1000; ++trial) {
            PolicyParams p = PolicyParams::zeros(4, 32, false);
            for (double& w : p.w) w = (unit(gen) - 0.5) * 2.0;
            SearchConfig cfg;
            cfg.strategy = Strategy::BestOfN;
            cfg.group_size = 2 + trial % 3;
            cfg.best_of = cfg.group_size + 1 + trial % 5;
            cfg.horizon = 4;
            cfg.bon_rank_by_score = trial % 2 == 1;
            std::uint64_t seed = rng::derive(88, static_cast<std::uint64_t>(trial));
            GroupResult g = generate_group(env, p, 5, seed, cfg, &score);

            const ScoreFn<FrozenLakeEnv>* rs = cfg.bon_rank_by_score ? &score : nullptr;
            std::vector<Trajectory> all;
            for (int r = 0; r < cfg.best_of; ++r)
                all.push_back(rollout_single(env, p, 5, seed, r, cfg, rs));
            std::vector<bool> taken(all.size(), false);
            for (int want = 0; want < cfg.group_size; ++want) {
                int best = -1;
                double best_key = 0.0;
                for (std::size_t i = 0; i < all.size(); ++i) {
                    if (taken[i]) continue;
                    double key = cfg.bon_rank_by_score ? all[i].score_sum()
                                                       : all[i].return_value;
                    if (best < 0 || key > best_key) {
                        best = static_cast<int>(i);
                        best_key = key;
                    }
                }
                taken[static_cast<std::size_t>(best)] = true;
                if (trajectory_to_json(g.trajectories[static_cast<std::size_t>(want)]) !=
                    trajectory_to_json(all[static_cast<std::size_t>(best)]))
                    return {false, "best-of-n selection diverged from scan oracle"};
            }
        }
        counts << ", best-of-n 1000";
    }

    // GAE recursion vs the direct discounted double sum
    {
        for (int trial = 0; trial < 1000; ++trial) {
            int n = 1 + trial % 9;
            double gamma = trial % 3 == 0 ? 1.0 : unit(gen);
            double lambda = trial % 4 == 0 ? 1.0 : unit(gen);
            std::vector<double> rewards(static_cast<std::size_t>(n));
            std::vector<double> values(static_cast<std::size_t>(n));
            for (double& r : rewards) r = (unit(gen) - 0.5) * 4.0;
            for (double& v : values) v = (unit(gen) - 0.5) * 4.0;
            std::vector<double> got = gae_advantages(rewards, values, gamma, lambda);
            for (int t = 0; t < n; ++t) {
                double sum = 0.0;
                for (int l = t; l < n; ++l) {
                    double next = l + 1 < n ? values[static_cast<std::size_t>(l + 1)] : 0.0;
                    double delta = rewards[static_cast<std::size_t>(l)] + gamma * next -
                                   values[static_cast<std::size_t>(l)];
                    sum += std::pow(gamma * lambda, l - t) * delta;
                }
                if (std::fabs(got[static_cast<std::size_t>(t)] - sum) > 1e-9)
                    return {false, "gae recursion diverged from direct sum"};
            }
        }
        counts << ", gae 1000";
    }

    // group-relative advantages vs the population formula
    {
        for (int trial = 0; trial < 1000; ++trial) {
            int n = 2 + trial % 7;
            std::vector<double> returns(static_cast<std::size_t>(n));
            for (double& r : returns) r = (unit(gen) - 0.5) * 6.0;
            if (trial % 11 == 0) std::fill(returns.begin(), returns.end(), returns[0]);
            double eps = 1e-8;
            std::vector<double> got = grpo_advantages(returns, eps);
            double mean = 0.0;
            for (double r : returns) mean += r;
            mean /= n;
            double var = 0.0;
            for (double r : returns) var += (r - mean) * (r - mean);
            var /= n;
            for (int i = 0; i < n; ++i) {
                double want = (returns[static_cast<std::size_t>(i)] - mean) /
                              (std::sqrt(var) + eps);
                if (std::fabs(got[static_cast<std::size_t>(i)] - want) > 1e-9)
                    return {false, "grpo advantages diverged from formula"};
            }
        }
        counts << ", grpo 1000";
    }

    // uncertainty filter vs brute-force sort
    {
        for (int trial = 0; trial < 1000; ++trial) {
            int n = 1 + trial % 12;
            double ratio = 0.01 + 0.99 * unit(gen);
            std::vector<double> u(static_cast<std::size_t>(n));
            for (double& x : u) x = unit(gen) * (trial % 5 == 0 ? 0.0 : 1.0);
            std::vector<int> got = filter_groups(u, ratio);
            std::vector<int> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return u[static_cast<std::size_t>(a)] > u[static_cast<std::size_t>(b)];
            });
            int keep = std::max(1, static_cast<int>(std::floor(ratio * n)));
            std::vector<int> want(order.begin(), order.begin() + keep);
            std::sort(want.begin(), want.end());
            if (got != want) return {false, "filter selection diverged from sort oracle"};
        }
        counts << ", filter 1000";
    }

    return {true, counts.str()};
}

// ---------------------------------------------------------------------------
// criterion 3: corner-trap fixture

// Always resets to the pillar-trap board; mechanics are plain Sokoban.
struct PillarEnv {
    SokobanEnv inner;
    using State = SokobanEnv::State;
    using StepResult = SokobanEnv::StepResult;

    PillarEnv() {
        SokobanEnv::Config c;
        c.width = 5;
        c.height = 5;
        c.num_boxes = 1;
        c.horizon = 8;
        inner = SokobanEnv(c);
    }

    EnvSpec spec() const { return inner.spec(); }
    State reset(std::uint64_t task_seed) const {
        State s;
        s.board = SokobanEnv::pillar_trap_board();
        s.status = StepStatus::Ongoing;
        s.stream = rng::Stream(rng::derive(task_seed, rng::domain::kTransition));
        return s;
    }
    StepResult step(State& s, int action) const { return inner.step(s, action); }
    std::vector<double> featurize(const State& s) const { return inner.featurize(s); }
    double turn_score(const State& prev, int action, const State& next,
                      const StepResult& r) const {
        return inner.turn_score(prev, action, next, r);
    }
};

// Linear weights over the box and agent one-hot channels: push right from
// the start cell ~59% of the time, otherwise walk the solution corridor.
PolicyParams push_right_policy() {
    constexpr int kFeat = 100, kBoxCh = 25, kAgentCh = 75;
    constexpr int kUp = 0, kDown = 1, kLeft = 2, kRight = 3;
    PolicyParams p = PolicyParams::zeros(4, kFeat, false);
    auto box = [&](int a, int cell, double w) {
        p.w[static_cast<std::size_t>(a * kFeat + kBoxCh + cell)] = w;
    };
    auto agent = [&](int a, int cell, double w) {
        p.w[static_cast<std::size_t>(a * kFeat + kAgentCh + cell)] = w;
    };

    int start_box = 2 * 5 + 2, pushed_box = 3 * 5 + 2;
    box(kDown, start_box, -8.0);  // never push down blindly...
    box(kDown, pushed_box, 8.0);  // ...until the box has moved down a row

    agent(kRight, 2 * 5 + 1, 1.25);  // the biased push
    agent(kUp, 2 * 5 + 1, 0.9);
    agent(kLeft, 2 * 5 + 1, -4.0);

    agent(kRight, 1 * 5 + 1, 5.0);   // walk over the box...
    agent(kDown, 1 * 5 + 2, 13.0);   // ...and push it down
    agent(kLeft, 2 * 5 + 2, 5.0);    // then circle around
    agent(kDown, 2 * 5 + 2, -12.0);
    agent(kRight, 3 * 5 + 1, 5.0);   // final push onto the target
    agent(kDown, 3 * 5 + 1, -12.0);
    return p;
}

bool replay_hits_deadlock(const PillarEnv& env, const Trajectory& t) {
    PillarEnv::State s = env.reset(t.seed);
    for (const TurnRecord& turn : t.turns) {
        env.step(s, turn.action);
        if (SokobanEnv::is_deadlocked(s.board)) return true;
        if (s.status != StepStatus::Ongoing) break;
    }
    return false;
}

Outcome criterion_corner_trap() {
    PillarEnv env;
    PolicyParams policy = push_right_policy();
    ScoreFn<PillarEnv> score = env_score_fn(env);

    SearchConfig naive;
    naive.strategy = Strategy::Naive;
    naive.group_size = 1;
    naive.horizon = 8;

    SearchConfig beam;
    beam.strategy = Strategy::Beam;
    beam.group_size = 16;
    beam.expansion = 4;
    beam.beam_width = 2;
    beam.horizon = 8;

    std::uint64_t root = rng::derive(3, rng::domain::kEval);
    int naive_deadlocks = 0, beam_rescues = 0;
    for (int i = 0; i < 100; ++i) {
        std::uint64_t seed = rng::derive(root, static_cast<std::uint64_t>(i));
        Trajectory solo = rollout_single(env, policy, static_cast<std::uint64_t>(i), seed, 0,
                                         naive, nullptr);
        if (replay_hits_deadlock(env, solo)) ++naive_deadlocks;

        GroupResult g = generate_group(env, policy, static_cast<std::uint64_t>(i), seed, beam,
                                       &score);
        for (const Trajectory& t : g.trajectories)
            if (t.terminal == Terminal::Success && !replay_hits_deadlock(env, t)) {
                ++beam_rescues;
                break;
            }
    }

    bool pass = naive_deadlocks > 50 && beam_rescues >= 95;
    return {pass, "naive deadlocked " + std::to_string(naive_deadlocks) +
                      "/100, beam solved " + std::to_string(beam_rescues) + "/100"};
}

// ---------------------------------------------------------------------------
// criteria 4, 6, 7: FrozenLake training arms

RunConfig lake_arm_base() {
    RunConfig cfg;
    cfg.env = "frozenlake";
    cfg.algorithm = Algorithm::Grpo;
    cfg.iterations = 300;
    cfg.tasks_per_iteration = 8;
    cfg.group_size = 8;
    cfg.horizon = 5;
    cfg.validation_tasks = 256;
    cfg.eval_every = 100;
    cfg.threads = 1;
    cfg.log_wall_clock = false;
    return cfg;
}

RunConfig beam_arm() {
    RunConfig cfg = lake_arm_base();
    cfg.strategy = Strategy::Beam;
    cfg.expansion = 4;
    cfg.beam_width = 2;
    return cfg;
}

RunConfig naive_arm() {
    RunConfig cfg = lake_arm_base();
    cfg.strategy = Strategy::Naive;
    return cfg;
}

RunConfig bon_arm() {
    RunConfig cfg = lake_arm_base();
    cfg.strategy = Strategy::BestOfN;
    cfg.best_of = 14;
    return cfg;
}

struct ArmResults {
    std::string name;
    RunConfig cfg;
    std::vector<TrainResult> runs;  // one per seed
    double mean_success = 0.0;
};

const std::vector<ArmResults>& lake_arms() {
    static std::vector<ArmResults> arms = [] {
        std::vector<ArmResults> out;
        out.push_back({"beam", beam_arm(), {}, 0.0});
        out.push_back({"naive", naive_arm(), {}, 0.0});
        out.push_back({"best_of_n", bon_arm(), {}, 0.0});
        for (ArmResults& arm : out) {
            for (int s = 0; s < 5; ++s) {
                RunConfig cfg = arm.cfg;
                cfg.root_seed = 1 + static_cast<std::uint64_t>(s);
                arm.runs.push_back(run_training(cfg));
                arm.mean_success += arm.runs.back().final_eval.success_rate;
            }
            arm.mean_success /= 5.0;
        }
        return out;
    }();
    return arms;
}

Outcome criterion_training_gain() {
    const auto& arms = lake_arms();
    double beam = arms[0].mean_success;
    double naive = arms[1].mean_success;
    double bon = arms[2].mean_success;
    bool pass = beam >= naive + 0.05 && beam >= bon;
    return {pass, "5-seed success means: beam " + fmt(beam) + ", filtering-only " +
                      fmt(naive) + ", best-of-n " + fmt(bon)};
}

Outcome criterion_stability() {
    const auto& arms = lake_arms();
    double worst_ratio = 0.0;
    for (const ArmResults& arm : arms) {
        for (const TrainResult& run : arm.runs) {
            const auto& m = run.metrics;
            for (std::size_t i = 50; i < m.size(); ++i) {
                std::vector<double> window;
                for (std::size_t j = i - 50; j < i; ++j) window.push_back(m[j].grad_norm);
                std::nth_element(window.begin(), window.begin() + 24, window.end());
                std::nth_element(window.begin() + 25, window.begin() + 25, window.end());
                double median = 0.5 * (window[24] + window[25]);
                if (median > 0.0)
                    worst_ratio = std::max(worst_ratio, m[i].grad_norm / median);
            }
            double first = 0.0, last = 0.0;
            for (int i = 0; i < 50; ++i) {
                first += m[static_cast<std::size_t>(i)].rollout_entropy;
                last += m[m.size() - 50 + static_cast<std::size_t>(i)].rollout_entropy;
            }
            if (!(last < first))
                return {false, arm.name + ": rollout entropy did not decay " +
                                   "(first-50 mean " + fmt(first / 50.0) + ", final-50 mean " +
                                   fmt(last / 50.0) + ")"};
        }
    }
    bool pass = worst_ratio <= 10.0;
    return {pass, "max grad_norm / trailing-50 median " + fmt(worst_ratio, 3) +
                      " (limit 10), entropy decayed in all 15 runs"};
}

Outcome criterion_determinism() {
    const auto& arms = lake_arms();
    for (const ArmResults& arm : arms) {
        std::string cached = format_metric_log(arm.runs[0].metrics);
        RunConfig cfg = arm.cfg;
        cfg.root_seed = 1;
        std::string rerun = format_metric_log(run_training(cfg).metrics);
        cfg.threads = 8;
        std::string wide = format_metric_log(run_training(cfg).metrics);
        if (rerun != cached) return {false, arm.name + ": rerun metric log differs"};
        if (wide != cached) return {false, arm.name + ": 8-worker metric log differs"};
    }
    return {true, "3 arms x (rerun + 8 workers): all metric logs bitwise identical"};
}

// ---------------------------------------------------------------------------
// criterion 5: budget scaling

Outcome criterion_budget_shape() {
    RunConfig base = beam_arm();
    base.root_seed = 1;
    base.ablate_seeds = 5;
    auto rows = run_ablation(base,
                             "expansion=2 beam_width=1\n"
                             "expansion=2 beam_width=2\n"
                             "expansion=6 beam_width=2\n");
    double s0 = rows[0].success_mean, s1 = rows[1].success_mean, s2 = rows[2].success_mean;
    bool pass = s0 <= s1 && s1 <= s2 && (s1 - s0) >= (s2 - s1);
    return {pass, "success means M2B1 " + fmt(s0) + " <= M2B2 " + fmt(s1) + " <= M6B2 " +
                      fmt(s2) + "; width gain " + fmt(s1 - s0) + " >= candidate gain " +
                      fmt(s2 - s1)};
}

// ---------------------------------------------------------------------------
// criterion 8: counts and contracts

Outcome criterion_contracts() {
    std::ostringstream detail;

    // exact group sizes for every strategy, including pre-solved resets
    {
        FrozenLakeEnv lake;
        ScoreFn<FrozenLakeEnv> lake_score = env_score_fn(lake);
        long checked = 0;
        for (int L : {1, 5, 8}) {
            for (int strat = 0; strat < 4; ++strat) {
                SearchConfig cfg;
                cfg.strategy = static_cast<Strategy>(strat);
                cfg.group_size = L;
                cfg.horizon = 4;
                cfg.best_of = L + 4;
                cfg.expansion = 3;
                cfg.beam_width = 2;
                cfg.lookahead_depth = 1;
                for (int t = 0; t < 10; ++t) {
                    PolicyParams p = PolicyParams::zeros(4, 32, false);
                    GroupResult g = generate_group(
                        lake, p, static_cast<std::uint64_t>(t),
                        rng::derive(123, static_cast<std::uint64_t>(t * 4 + strat)), cfg,
                        &lake_score);
                    if (static_cast<int>(g.trajectories.size()) != L)
                        return {false, "group size violated on frozenlake"};
                    for (const Trajectory& traj : g.trajectories) {
                        double sum = 0.0;
                        for (const TurnRecord& turn : traj.turns) sum += turn.reward;
                        if (traj.return_value != sum)
                            return {false, "return differs from reward sum"};
                    }
                    checked += L;
                }
            }
        }

        SokobanEnv::Config solved_cfg;
        solved_cfg.pull_steps = 0;  // reverse-play identity: boards reset solved
        SokobanEnv solved(solved_cfg);
        ScoreFn<SokobanEnv> sok_score = env_score_fn(solved);
        for (int strat = 0; strat < 4; ++strat) {
            SearchConfig cfg;
            cfg.strategy = static_cast<Strategy>(strat);
            cfg.group_size = 6;
            cfg.horizon = 4;
            cfg.best_of = 9;
            GroupResult g = generate_group(solved, PolicyParams::zeros(4, 100, false), 0,
                                           rng::derive(9, static_cast<std::uint64_t>(strat)),
                                           cfg, &sok_score);
            if (static_cast<int>(g.trajectories.size()) != 6)
                return {false, "group size violated on pre-solved sokoban"};
            checked += 6;
        }
        detail << checked << " trajectories across strategies";
    }

    // filter count formula over a ratio/size grid
    {
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (double ratio : {0.01, 0.1, 0.25, 0.3313, 0.5, 0.75, 0.9999, 1.0}) {
            for (int n = 1; n <= 12; ++n) {
                std::vector<double> u(static_cast<std::size_t>(n));
                for (double& x : u) x = unit(gen);
                int want = std::max(1, static_cast<int>(std::floor(ratio * n)));
                if (static_cast<int>(filter_groups(u, ratio).size()) != want)
                    return {false, "filter retained count diverged from max(1, floor(p*P))"};
            }
        }
        detail << ", filter grid 96";
    }

    // slip frequencies: chi-square over 10,000 single-draw steps
    {
        FrozenLakeEnv::Config cfg;
        cfg.size = 8;
        FrozenLakeEnv env(cfg);
        FrozenLakeEnv::Map map;
        map.size = 8;
        map.holes = 0;
        map.start = 0;
        map.goal = 63;

        long up = 0, left = 0, right = 0;
        for (int i = 0; i < 10000; ++i) {
            FrozenLakeEnv::State s;
            s.map = map;
            s.agent = 3 * 8 + 3;
            s.stream = rng::Stream(rng::derive(27, static_cast<std::uint64_t>(i)));
            env.step(s, FrozenLakeEnv::kUp);
            if (s.agent == 2 * 8 + 3) ++up;
            else if (s.agent == 3 * 8 + 2) ++left;
            else if (s.agent == 3 * 8 + 4) ++right;
            else return {false, "slip produced a reversed or diagonal move"};
        }
        double expect = 10000.0 / 3.0;
        double chi = 0.0;
        for (long c : {up, left, right}) chi += (c - expect) * (c - expect) / expect;
        if (chi >= 9.210)
            return {false, "slip chi-square " + fmt(chi, 3) + " >= 9.210 (p <= 0.01)"};
        detail << ", slip chi-square " << fmt(chi, 3) << " < 9.210";
    }

    return {true, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
    std::map<int, std::function<Outcome()>> criteria = {
        {1, criterion_gradients},   {2, criterion_oracles},     {3, criterion_corner_trap},
        {4, criterion_training_gain}, {5, criterion_budget_shape}, {6, criterion_stability},
        {7, criterion_determinism}, {8, criterion_contracts},
    };
    // spec'd wall-clock budgets, seconds; 0 = no bound
    std::map<int, double> budgets = {{1, 10.0}, {2, 30.0}, {3, 60.0}, {4, 900.0},
                                     {5, 2700.0}, {6, 0.0}, {7, 0.0}, {8, 0.0}};

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [num, fn] : criteria) selected.push_back(num);
    std::sort(selected.begin(), selected.end());

    bool all_pass = true;
    for (int num : selected) {
        auto it = criteria.find(num);
        if (it == criteria.end()) {
            std::printf("[FAIL] criterion %d: unknown criterion\n", num);
            all_pass = false;
            continue;
        }
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = it->second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count();
        double budget = budgets[num];
        if (budget > 0.0 && secs >= budget) {
            out.pass = false;
            out.detail += " [over budget " + fmt(budget, 0) + "s]";
        }
        std::printf("[%s] criterion %d: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", num,
                    out.detail.c_str(), secs);
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
