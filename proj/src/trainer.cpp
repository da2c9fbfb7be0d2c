#include "tsr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tsr/filtering.hpp"
#include "tsr/frozen_lake.hpp"
#include "tsr/minishop.hpp"
#include "tsr/optimizers.hpp"
#include "tsr/parallel.hpp"
#include "tsr/search.hpp"
#include "tsr/serialize.hpp"
#include "tsr/sokoban.hpp"

namespace tsr {

namespace {

namespace fs = std::filesystem;

SokobanEnv make_sokoban(const RunConfig& cfg) {
    SokobanEnv::Config c;
    c.width = cfg.sokoban_width;
    c.height = cfg.sokoban_height;
    c.num_boxes = cfg.sokoban_boxes;
    c.pull_steps = cfg.sokoban_pulls;
    c.horizon = cfg.horizon;
    return SokobanEnv(c);
}

FrozenLakeEnv make_lake(const RunConfig& cfg) {
    FrozenLakeEnv::Config c;
    c.size = cfg.lake_size;
    c.hole_density = cfg.lake_hole_density;
    c.hole_penalty = cfg.lake_hole_penalty;
    c.horizon = cfg.horizon;
    c.min_start_dist = cfg.lake_min_start_dist;
    c.max_start_dist = cfg.lake_max_start_dist;
    return FrozenLakeEnv(c);
}

MiniShopEnv make_shop(const RunConfig& cfg) {
    MiniShopEnv::Config c;
    c.catalog_size = cfg.shop_catalog;
    c.alpha = cfg.shop_alpha;
    c.beta = cfg.shop_beta;
    c.horizon = cfg.horizon;
    return MiniShopEnv(c);
}

template <class F>
auto with_env(const RunConfig& cfg, F&& fn) {
    if (cfg.env == "sokoban") return fn(make_sokoban(cfg));
    if (cfg.env == "frozenlake") return fn(make_lake(cfg));
    if (cfg.env == "minishop") return fn(make_shop(cfg));
    throw ConfigError("config: unknown env: " + cfg.env);
}

void check_fit(const Checkpoint& ckpt, const RunConfig& cfg) {
    if (ckpt.env_name != cfg.env)
        throw ConfigError("checkpoint was trained on env '" + ckpt.env_name +
                          "', config says '" + cfg.env + "'");
    EnvSpec spec = with_env(cfg, [](const auto& env) { return env.spec(); });
    if (ckpt.params.action_count != spec.action_count ||
        ckpt.params.feature_dim != spec.feature_dim)
        throw ConfigError("checkpoint parameter shape does not fit the configured env");
}

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw ConfigError("cannot create directory " + p.string() + ": " + ec.message());
}

template <class E>
EvalResult eval_impl(const E& env, const PolicyParams& params, const RunConfig& cfg) {
    EvalResult out;
    int n = cfg.validation_tasks;
    if (n <= 0) return out;

    SearchConfig scfg;
    scfg.strategy = Strategy::Naive;
    scfg.group_size = 1;
    scfg.horizon = cfg.horizon;
    scfg.temperature = cfg.eval_temperature;

    std::uint64_t val_root = rng::derive(cfg.root_seed, rng::domain::kValTasks);
    std::vector<Trajectory> rollouts(static_cast<std::size_t>(n));
    parallel_for(n, cfg.threads, [&](int v) {
        std::uint64_t seed = rng::derive(val_root, static_cast<std::uint64_t>(v));
        rollouts[static_cast<std::size_t>(v)] =
            rollout_single(env, params, static_cast<std::uint64_t>(v), seed, 0, scfg, nullptr);
    });

    for (const Trajectory& t : rollouts) {
        out.success_rate += t.terminal == Terminal::Success ? 1.0 : 0.0;
        out.mean_turns += t.num_turns();
        out.mean_return += t.return_value;
    }
    out.success_rate /= n;
    out.mean_turns /= n;
    out.mean_actions = out.mean_turns;  // exactly one action per turn
    out.mean_return /= n;
    return out;
}

template <class E>
TrainResult train_impl(const E& env, const RunConfig& cfg, const MetricCallback& on_metric) {
    EnvSpec spec = env.spec();
    bool has_value = cfg.algorithm == Algorithm::Ppo;
    PolicyParams params = PolicyParams::zeros(spec.action_count, spec.feature_dim, has_value);
    AdamState adam = AdamState::zeros(params.size());
    AdamConfig opt;
    opt.lr = cfg.learning_rate;

    SearchConfig scfg = cfg.search_config();
    ScoreFn<E> score = env_score_fn(env);

    PpoConfig pcfg;
    pcfg.clip_low = cfg.clip_low;
    pcfg.clip_high = cfg.clip_high;
    pcfg.entropy_coef = cfg.entropy_coef;
    pcfg.value_coef = cfg.value_coef;
    pcfg.gae_gamma = cfg.gae_gamma;
    pcfg.gae_lambda = cfg.gae_lambda;
    pcfg.temperature = cfg.temperature;
    pcfg.minibatch_turns = cfg.minibatch_turns;

    GrpoConfig gcfg;
    gcfg.clip_low = cfg.clip_low;
    gcfg.clip_high = cfg.clip_high;
    gcfg.entropy_coef = cfg.entropy_coef;
    gcfg.norm_eps = cfg.norm_eps;
    gcfg.temperature = cfg.temperature;
    gcfg.minibatch_turns = cfg.minibatch_turns;

    const bool writing = !cfg.out_dir.empty();
    fs::path out_dir(cfg.out_dir);
    if (writing) {
        ensure_dir(out_dir);
        std::ofstream(out_dir / "config.txt") << save_config(cfg);
        if (cfg.dump_rollouts) std::ofstream(out_dir / "rollouts.jsonl");  // truncate
    }

    std::uint64_t train_root = rng::derive(cfg.root_seed, rng::domain::kTrainTasks);
    std::uint64_t shuffle_root = rng::derive(cfg.root_seed, rng::domain::kShuffle);

    TrainResult result;
    const int P = cfg.tasks_per_iteration;

    for (int it = 0; it < cfg.iterations; ++it) {
        auto t0 = std::chrono::steady_clock::now();

        std::vector<GroupResult> groups(static_cast<std::size_t>(P));
        parallel_for(P, cfg.threads, [&](int g) {
            std::uint64_t index =
                static_cast<std::uint64_t>(it) * static_cast<std::uint64_t>(P) +
                static_cast<std::uint64_t>(g);
            std::uint64_t seed = rng::derive(train_root, index);
            groups[static_cast<std::size_t>(g)] =
                generate_group(env, params, index, seed, scfg, &score);
        });

        // rollout diagnostics are taken pre-filter, at the rollout parameters
        double sum_return = 0.0, sum_entropy = 0.0;
        long total_turns = 0, total_traj = 0;
        for (const GroupResult& g : groups) {
            for (const Trajectory& t : g.trajectories) {
                sum_return += t.return_value;
                total_turns += t.num_turns();
                ++total_traj;
                for (const TurnRecord& turn : t.turns)
                    sum_entropy +=
                        policy_entropy(params, turn.features, turn.mask, cfg.temperature);
            }
        }

        std::vector<double> uncertainty(groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g)
            uncertainty[g] = outcome_uncertainty(groups[g].returns());
        std::vector<int> retained = filter_groups(uncertainty, cfg.retain_ratio);

        rng::Stream shuffle(rng::derive(shuffle_root, static_cast<std::uint64_t>(it)));
        UpdateStats stats;
        if (cfg.algorithm == Algorithm::Ppo) {
            std::vector<Trajectory> batch;
            for (int g : retained)
                for (const Trajectory& t : groups[static_cast<std::size_t>(g)].trajectories)
                    batch.push_back(t);
            stats = ppo_update(params, adam, opt, batch, pcfg, shuffle);
        } else {
            std::vector<GroupResult> batch;
            for (int g : retained) batch.push_back(groups[static_cast<std::size_t>(g)]);
            stats = grpo_update(params, adam, opt, batch, gcfg, shuffle);
        }

        int iteration = it + 1;
        bool eval_now = iteration % cfg.eval_every == 0 || iteration == cfg.iterations;

        MetricRecord rec;
        rec.iteration = iteration;
        rec.mean_return = sum_return / static_cast<double>(total_traj);
        rec.rollout_entropy =
            total_turns > 0 ? sum_entropy / static_cast<double>(total_turns) : 0.0;
        rec.grad_norm = stats.grad_norm;
        rec.mean_turns = static_cast<double>(total_turns) / static_cast<double>(total_traj);
        rec.mean_actions = rec.mean_turns;

        if (eval_now && cfg.validation_tasks > 0) {
            result.final_eval = eval_impl(env, params, cfg);
            rec.has_success = true;
            rec.success_rate = result.final_eval.success_rate;
        }
        if (cfg.log_wall_clock) {
            rec.has_wall_clock = true;
            rec.wall_clock_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        result.metrics.push_back(rec);
        if (on_metric) on_metric(rec);

        if (writing) {
            std::ofstream(out_dir / "metrics.txt") << format_metric_log(result.metrics);
            if (cfg.dump_rollouts) {
                std::ofstream dump(out_dir / "rollouts.jsonl", std::ios::app);
                for (const GroupResult& g : groups) dump << dump_trajectories(g.trajectories);
            }
            if (eval_now) {
                Checkpoint ckpt{params, adam, true, cfg.env, iteration, cfg.root_seed};
                save_checkpoint_file(
                    (out_dir / ("checkpoint_" + std::to_string(iteration) + ".txt")).string(),
                    ckpt);
            }
        }

        if (!std::isfinite(rec.mean_return) || !std::isfinite(rec.rollout_entropy) ||
            !std::isfinite(rec.grad_norm))
            throw NumericError("training metric went non-finite at iteration " +
                               std::to_string(iteration));
    }

    result.checkpoint = Checkpoint{params, adam, true, cfg.env, cfg.iterations, cfg.root_seed};
    if (writing)
        save_checkpoint_file((out_dir / "checkpoint_final.txt").string(), result.checkpoint);
    return result;
}

std::string fixed_width(double x, int precision) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << x;
    return out.str();
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

std::string chart_num(double x) {
    std::ostringstream out;
    out.precision(6);
    out << x;
    return out.str();
}

std::string render_chart(const std::string& name,
                         const std::vector<std::pair<int, double>>& points,
                         const std::vector<double>& smoothed) {
    const double width = 640, height = 360;
    const double left = 64, right = 16, top = 30, bottom = 36;

    double x0 = points.front().first, x1 = points.back().first;
    double lo = points.front().second, hi = lo;
    for (const auto& pv : points) {
        lo = std::min(lo, pv.second);
        hi = std::max(hi, pv.second);
    }
    for (double v : smoothed) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double x0r = x0, x1r = x1, lor = lo, hir = hi;
    if (x1 == x0) {
        x0 -= 1;
        x1 += 1;
    }
    if (hi == lo) {
        lo -= 1;
        hi += 1;
    }
    auto px = [&](double i) { return left + (i - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double v) {
        return height - bottom - (v - lo) / (hi - lo) * (height - top - bottom);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 360\" "
        << "font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"640\" height=\"360\" fill=\"white\"/>\n";
    svg << "<text x=\"10\" y=\"20\" font-size=\"14\" fill=\"#222\">" << name << "</text>\n";
    svg << "<line x1=\"" << fixed_width(left, 1) << "\" y1=\"" << fixed_width(top, 1)
        << "\" x2=\"" << fixed_width(left, 1) << "\" y2=\"" << fixed_width(height - bottom, 1)
        << "\" stroke=\"#555\"/>\n";
    svg << "<line x1=\"" << fixed_width(left, 1) << "\" y1=\"" << fixed_width(height - bottom, 1)
        << "\" x2=\"" << fixed_width(width - right, 1) << "\" y2=\""
        << fixed_width(height - bottom, 1) << "\" stroke=\"#555\"/>\n";
    svg << "<text x=\"6\" y=\"" << fixed_width(top + 4, 1) << "\" fill=\"#555\" font-size=\"10\">"
        << chart_num(hir) << "</text>\n";
    svg << "<text x=\"6\" y=\"" << fixed_width(height - bottom, 1)
        << "\" fill=\"#555\" font-size=\"10\">" << chart_num(lor) << "</text>\n";
    svg << "<text x=\"" << fixed_width(left, 1) << "\" y=\"" << fixed_width(height - 14, 1)
        << "\" fill=\"#555\" font-size=\"10\">" << static_cast<long long>(x0r) << "</text>\n";
    svg << "<text x=\"" << fixed_width(width - right - 40, 1) << "\" y=\""
        << fixed_width(height - 14, 1) << "\" fill=\"#555\" font-size=\"10\">"
        << static_cast<long long>(x1r) << "</text>\n";

    auto polyline = [&](const char* color, const char* stroke_width, auto value_at) {
        std::ostringstream pts;
        for (std::size_t i = 0; i < points.size(); ++i)
            pts << fixed_width(px(points[i].first), 2) << ','
                << fixed_width(py(value_at(i)), 2) << ' ';
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
            << stroke_width << "\" points=\"" << pts.str() << "\"/>\n";
    };
    if (points.size() == 1) {
        svg << "<circle cx=\"" << fixed_width(px(points[0].first), 2) << "\" cy=\""
            << fixed_width(py(points[0].second), 2) << "\" r=\"3\" fill=\"#1f5fa8\"/>\n";
    } else {
        polyline("#9ec5e8", "1",
                 [&](std::size_t i) { return points[i].second; });
        polyline("#1f5fa8", "2", [&](std::size_t i) { return smoothed[i]; });
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

TrainResult run_training(const RunConfig& cfg, const MetricCallback& on_metric) {
    validate_config(cfg);
    return with_env(cfg, [&](const auto& env) { return train_impl(env, cfg, on_metric); });
}

EvalResult evaluate_policy(const PolicyParams& params, const RunConfig& cfg) {
    return with_env(cfg, [&](const auto& env) { return eval_impl(env, params, cfg); });
}

EvalResult evaluate_checkpoint(const Checkpoint& ckpt, const RunConfig& cfg) {
    check_fit(ckpt, cfg);
    return evaluate_policy(ckpt.params, cfg);
}

std::vector<Trajectory> rollout_dump(const Checkpoint& ckpt, const RunConfig& cfg, int tasks) {
    if (tasks < 1) throw ConfigError("dump: tasks must be >= 1");
    check_fit(ckpt, cfg);
    return with_env(cfg, [&](const auto& env) {
        using E = std::decay_t<decltype(env)>;
        SearchConfig scfg;
        scfg.strategy = Strategy::Naive;
        scfg.group_size = 1;
        scfg.horizon = cfg.horizon;
        scfg.temperature = cfg.eval_temperature;
        ScoreFn<E> score = env_score_fn(env);

        std::uint64_t root = rng::derive(cfg.root_seed, rng::domain::kEval);
        std::vector<Trajectory> out(static_cast<std::size_t>(tasks));
        parallel_for(tasks, cfg.threads, [&](int t) {
            std::uint64_t seed = rng::derive(root, static_cast<std::uint64_t>(t));
            out[static_cast<std::size_t>(t)] = rollout_single(
                env, ckpt.params, static_cast<std::uint64_t>(t), seed, 0, scfg, &score);
        });
        return out;
    });
}

std::vector<SweepRow> parse_sweep(const std::string& text) {
    std::vector<SweepRow> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        SweepRow row;
        std::istringstream tokens(line);
        for (std::string tok; tokens >> tok;) {
            std::size_t eq = tok.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError("sweep: expected key=value, got: " + tok);
            row.overrides.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
            if (!row.label.empty()) row.label += ' ';
            row.label += tok;
        }
        if (row.overrides.empty()) continue;
        bool duplicate = std::any_of(rows.begin(), rows.end(), [&](const SweepRow& r) {
            return r.overrides == row.overrides;
        });
        if (!duplicate) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("sweep: no configurations listed");
    return rows;
}

std::vector<AblationRow> run_ablation(const RunConfig& base, const std::string& sweep_text,
                                      const AblationCallback& progress) {
    std::vector<SweepRow> rows = parse_sweep(sweep_text);
    std::vector<AblationRow> out;
    for (const SweepRow& row : rows) {
        RunConfig cfg = base;
        for (const auto& [key, value] : row.overrides) apply_config_override(cfg, key, value);
        cfg.out_dir.clear();
        cfg.dump_rollouts = false;
        cfg.log_wall_clock = false;
        validate_config(cfg);

        std::vector<EvalResult> evals;
        std::uint64_t seed_base = cfg.root_seed;
        for (int s = 0; s < cfg.ablate_seeds; ++s) {
            cfg.root_seed = seed_base + static_cast<std::uint64_t>(s);
            TrainResult r = run_training(cfg);
            evals.push_back(r.final_eval);
            if (progress) progress(row.label, s, r.final_eval);
        }

        AblationRow res;
        res.label = row.label;
        res.seeds = static_cast<int>(evals.size());
        for (const EvalResult& e : evals) {
            res.success_mean += e.success_rate;
            res.turns_mean += e.mean_turns;
            res.return_mean += e.mean_return;
        }
        res.success_mean /= res.seeds;
        res.turns_mean /= res.seeds;
        res.return_mean /= res.seeds;
        double var = 0.0;
        for (const EvalResult& e : evals) {
            double d = e.success_rate - res.success_mean;
            var += d * d;
        }
        res.success_std = std::sqrt(var / res.seeds);
        out.push_back(std::move(res));
    }
    return out;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
    std::size_t label_width = std::string("overrides").size();
    for (const AblationRow& r : rows) label_width = std::max(label_width, r.label.size());
    std::ostringstream out;
    out << pad("overrides", label_width)
        << "  seeds  success_mean  success_std  mean_turns  mean_return\n";
    for (const AblationRow& r : rows) {
        out << pad(r.label, label_width) << "  " << pad(std::to_string(r.seeds), 5) << "  "
            << pad(fixed_width(r.success_mean, 6), 12) << "  "
            << pad(fixed_width(r.success_std, 6), 11) << "  "
            << pad(fixed_width(r.turns_mean, 6), 10) << "  " << fixed_width(r.return_mean, 6)
            << '\n';
    }
    return out.str();
}

std::vector<std::string> emit_plots(const std::vector<MetricRecord>& metrics,
                                    const std::string& out_dir, int window) {
    if (metrics.empty()) throw ConfigError("plot: metric log is empty");
    if (window < 1) throw ConfigError("plot: window must be >= 1");
    ensure_dir(out_dir);

    struct Series {
        std::string name;
        std::vector<std::pair<int, double>> points;
    };
    std::vector<Series> series;
    auto add = [&](const std::string& name, auto has, auto get) {
        Series s;
        s.name = name;
        for (const MetricRecord& m : metrics)
            if (has(m)) s.points.emplace_back(m.iteration, get(m));
        if (!s.points.empty()) series.push_back(std::move(s));
    };
    auto always = [](const MetricRecord&) { return true; };
    add("mean_return", always, [](const MetricRecord& m) { return m.mean_return; });
    add("rollout_entropy", always, [](const MetricRecord& m) { return m.rollout_entropy; });
    add("grad_norm", always, [](const MetricRecord& m) { return m.grad_norm; });
    add("mean_turns", always, [](const MetricRecord& m) { return m.mean_turns; });
    add("mean_actions", always, [](const MetricRecord& m) { return m.mean_actions; });
    add("success_rate", [](const MetricRecord& m) { return m.has_success; },
        [](const MetricRecord& m) { return m.success_rate; });
    add("wall_clock_seconds", [](const MetricRecord& m) { return m.has_wall_clock; },
        [](const MetricRecord& m) { return m.wall_clock_seconds; });

    std::vector<std::string> names;
    for (const Series& s : series) {
        // trailing mean over the series' own points, summed left to right
        std::vector<double> smoothed(s.points.size());
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            std::size_t span = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
            double sum = 0.0;
            for (std::size_t j = i + 1 - span; j <= i; ++j) sum += s.points[j].second;
            smoothed[i] = sum / static_cast<double>(span);
        }

        std::ofstream tsv(fs::path(out_dir) / (s.name + ".tsv"));
        tsv << "iteration\tvalue\tsmoothed\n";
        tsv.precision(17);
        for (std::size_t i = 0; i < s.points.size(); ++i)
            tsv << s.points[i].first << '\t' << s.points[i].second << '\t' << smoothed[i]
                << '\n';

        std::ofstream svg(fs::path(out_dir) / (s.name + ".svg"));
        svg << render_chart(s.name, s.points, smoothed);
        names.push_back(s.name);
    }
    return names;
}

}  // namespace tsr
