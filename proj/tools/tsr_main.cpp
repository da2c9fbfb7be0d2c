#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tsr/config.hpp"
#include "tsr/metrics.hpp"
#include "tsr/serialize.hpp"
#include "tsr/trainer.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tsr::ConfigError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw tsr::ConfigError("cannot write: " + path);
    out << text;
}

std::string format_eval(const tsr::EvalResult& e) {
    std::ostringstream out;
    out.precision(17);
    out << "success_rate=" << e.success_rate << " mean_turns=" << e.mean_turns
        << " mean_actions=" << e.mean_actions << " mean_return=" << e.mean_return;
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trajectory-search rollout training for small discrete environments"};
    app.require_subcommand(1);

    std::string config_path, checkpoint_path, sweep_path, metrics_path, out;
    std::uint64_t seed = 0;
    int tasks = 0;
    int window = 10;

    auto* train = app.add_subcommand("train", "run the training loop");
    train->add_option("--config", config_path, "run config file")->required();
    auto* seed_opt = train->add_option("--seed", seed, "override root_seed");
    train->add_option("--out", out, "override out_dir");

    auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on the validation tasks");
    eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    eval_cmd->add_option("--config", config_path, "run config file")->required();

    auto* ablate = app.add_subcommand("ablate", "seed-averaged sweep of config overrides");
    ablate->add_option("--config", config_path, "base config file")->required();
    ablate->add_option("--sweep", sweep_path, "one override row per line")->required();
    ablate->add_option("--out", out, "write the table here instead of stdout");

    auto* plot = app.add_subcommand("plot", "per-metric series files and charts");
    plot->add_option("--metrics", metrics_path, "metric log file")->required();
    plot->add_option("--out", out, "output directory (default: plots)");
    plot->add_option("--window", window, "trailing smoothing window (default 10)");

    auto* dump = app.add_subcommand("dump", "roll out a checkpoint and print trajectories");
    dump->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    dump->add_option("--tasks", tasks, "number of rollout tasks")->required();
    dump->add_option("--config", config_path,
                     "env config; defaults to the checkpoint's env when absent");
    dump->add_option("--out", out, "write records here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train) {
            tsr::RunConfig cfg = tsr::load_config_file(config_path);
            if (seed_opt->count() > 0) cfg.root_seed = seed;
            if (!out.empty()) cfg.out_dir = out;
            tsr::TrainResult result = tsr::run_training(cfg, [](const tsr::MetricRecord& m) {
                std::cout << tsr::format_metric(m) << std::endl;
            });
            std::cout << "final " << format_eval(result.final_eval) << '\n';
        } else if (*eval_cmd) {
            tsr::RunConfig cfg = tsr::load_config_file(config_path);
            tsr::validate_config(cfg);
            tsr::Checkpoint ckpt = tsr::load_checkpoint_file(checkpoint_path);
            std::cout << format_eval(tsr::evaluate_checkpoint(ckpt, cfg)) << '\n';
        } else if (*ablate) {
            tsr::RunConfig cfg = tsr::load_config_file(config_path);
            auto rows = tsr::run_ablation(
                cfg, read_file(sweep_path),
                [](const std::string& label, int s, const tsr::EvalResult& e) {
                    std::cerr << label << " seed " << s << ": " << format_eval(e) << '\n';
                });
            std::string table = tsr::format_ablation_table(rows);
            if (out.empty())
                std::cout << table;
            else
                write_file(out, table);
        } else if (*plot) {
            auto metrics = tsr::parse_metric_log(read_file(metrics_path));
            std::string dir = out.empty() ? "plots" : out;
            for (const std::string& name : tsr::emit_plots(metrics, dir, window))
                std::cout << dir << "/" << name << ".tsv\n";
        } else if (*dump) {
            tsr::Checkpoint ckpt = tsr::load_checkpoint_file(checkpoint_path);
            tsr::RunConfig cfg;
            if (config_path.empty()) {
                cfg.env = ckpt.env_name;
                cfg.root_seed = ckpt.root_seed;
            } else {
                cfg = tsr::load_config_file(config_path);
            }
            tsr::validate_config(cfg);
            std::string text = tsr::dump_trajectories(tsr::rollout_dump(ckpt, cfg, tasks));
            if (out.empty())
                std::cout << text;
            else
                write_file(out, text);
        }
    } catch (const tsr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
