#include "tsr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tsr {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": " + v);
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": " + v);
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad unsigned integer for " + key + ": " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError("config: bad boolean for " + key + ": " + v);
}

std::string format_double(double x) {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

}  // namespace

void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "env") {
        if (value != "frozenlake" && value != "sokoban" && value != "minishop")
            throw ConfigError("config: unknown env: " + value);
        cfg.env = value;
    } else if (key == "algorithm") cfg.algorithm = algorithm_from_string(value);
    else if (key == "strategy") cfg.strategy = strategy_from_string(value);
    else if (key == "iterations") cfg.iterations = to_int(key, value);
    else if (key == "tasks_per_iteration") cfg.tasks_per_iteration = to_int(key, value);
    else if (key == "group_size") cfg.group_size = to_int(key, value);
    else if (key == "horizon") cfg.horizon = to_int(key, value);
    else if (key == "best_of") cfg.best_of = to_int(key, value);
    else if (key == "expansion") cfg.expansion = to_int(key, value);
    else if (key == "beam_width") cfg.beam_width = to_int(key, value);
    else if (key == "lookahead_depth") cfg.lookahead_depth = to_int(key, value);
    else if (key == "temperature") cfg.temperature = to_double(key, value);
    else if (key == "eval_temperature") cfg.eval_temperature = to_double(key, value);
    else if (key == "bon_rank_by_score") cfg.bon_rank_by_score = to_bool(key, value);
    else if (key == "retain_ratio") cfg.retain_ratio = to_double(key, value);
    else if (key == "root_seed") cfg.root_seed = to_u64(key, value);
    else if (key == "validation_tasks") cfg.validation_tasks = to_int(key, value);
    else if (key == "eval_every") cfg.eval_every = to_int(key, value);
    else if (key == "threads") cfg.threads = to_int(key, value);
    else if (key == "learning_rate") cfg.learning_rate = to_double(key, value);
    else if (key == "entropy_coef") cfg.entropy_coef = to_double(key, value);
    else if (key == "clip_low") cfg.clip_low = to_double(key, value);
    else if (key == "clip_high") cfg.clip_high = to_double(key, value);
    else if (key == "value_coef") cfg.value_coef = to_double(key, value);
    else if (key == "gae_gamma") cfg.gae_gamma = to_double(key, value);
    else if (key == "gae_lambda") cfg.gae_lambda = to_double(key, value);
    else if (key == "norm_eps") cfg.norm_eps = to_double(key, value);
    else if (key == "minibatch_turns") cfg.minibatch_turns = to_int(key, value);
    else if (key == "log_wall_clock") cfg.log_wall_clock = to_bool(key, value);
    else if (key == "dump_rollouts") cfg.dump_rollouts = to_bool(key, value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "sokoban_width") cfg.sokoban_width = to_int(key, value);
    else if (key == "sokoban_height") cfg.sokoban_height = to_int(key, value);
    else if (key == "sokoban_boxes") cfg.sokoban_boxes = to_int(key, value);
    else if (key == "sokoban_pulls") cfg.sokoban_pulls = to_int(key, value);
    else if (key == "lake_size") cfg.lake_size = to_int(key, value);
    else if (key == "lake_hole_density") cfg.lake_hole_density = to_double(key, value);
    else if (key == "lake_hole_penalty") cfg.lake_hole_penalty = to_double(key, value);
    else if (key == "lake_min_start_dist") cfg.lake_min_start_dist = to_int(key, value);
    else if (key == "lake_max_start_dist") cfg.lake_max_start_dist = to_int(key, value);
    else if (key == "shop_catalog") cfg.shop_catalog = to_int(key, value);
    else if (key == "shop_alpha") cfg.shop_alpha = to_double(key, value);
    else if (key == "shop_beta") cfg.shop_beta = to_double(key, value);
    else if (key == "ablate_seeds") cfg.ablate_seeds = to_int(key, value);
    else if (key == "plot_window") cfg.plot_window = to_int(key, value);
    else throw ConfigError("config: unknown key: " + key);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) + " has no '='");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(line_no));
        apply_config_override(cfg, key, value);
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string save_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "env = " << cfg.env << '\n';
    out << "algorithm = " << to_string(cfg.algorithm) << '\n';
    out << "strategy = " << to_string(cfg.strategy) << '\n';
    out << "iterations = " << cfg.iterations << '\n';
    out << "tasks_per_iteration = " << cfg.tasks_per_iteration << '\n';
    out << "group_size = " << cfg.group_size << '\n';
    out << "horizon = " << cfg.horizon << '\n';
    out << "best_of = " << cfg.best_of << '\n';
    out << "expansion = " << cfg.expansion << '\n';
    out << "beam_width = " << cfg.beam_width << '\n';
    out << "lookahead_depth = " << cfg.lookahead_depth << '\n';
    out << "temperature = " << format_double(cfg.temperature) << '\n';
    out << "eval_temperature = " << format_double(cfg.eval_temperature) << '\n';
    out << "bon_rank_by_score = " << (cfg.bon_rank_by_score ? 1 : 0) << '\n';
    out << "retain_ratio = " << format_double(cfg.retain_ratio) << '\n';
    out << "root_seed = " << cfg.root_seed << '\n';
    out << "validation_tasks = " << cfg.validation_tasks << '\n';
    out << "eval_every = " << cfg.eval_every << '\n';
    out << "threads = " << cfg.threads << '\n';
    out << "learning_rate = " << format_double(cfg.learning_rate) << '\n';
    out << "entropy_coef = " << format_double(cfg.entropy_coef) << '\n';
    out << "clip_low = " << format_double(cfg.clip_low) << '\n';
    out << "clip_high = " << format_double(cfg.clip_high) << '\n';
    out << "value_coef = " << format_double(cfg.value_coef) << '\n';
    out << "gae_gamma = " << format_double(cfg.gae_gamma) << '\n';
    out << "gae_lambda = " << format_double(cfg.gae_lambda) << '\n';
    out << "norm_eps = " << format_double(cfg.norm_eps) << '\n';
    out << "minibatch_turns = " << cfg.minibatch_turns << '\n';
    out << "log_wall_clock = " << (cfg.log_wall_clock ? 1 : 0) << '\n';
    out << "dump_rollouts = " << (cfg.dump_rollouts ? 1 : 0) << '\n';
    if (!cfg.out_dir.empty()) out << "out_dir = " << cfg.out_dir << '\n';
    out << "sokoban_width = " << cfg.sokoban_width << '\n';
    out << "sokoban_height = " << cfg.sokoban_height << '\n';
    out << "sokoban_boxes = " << cfg.sokoban_boxes << '\n';
    out << "sokoban_pulls = " << cfg.sokoban_pulls << '\n';
    out << "lake_size = " << cfg.lake_size << '\n';
    out << "lake_hole_density = " << format_double(cfg.lake_hole_density) << '\n';
    out << "lake_hole_penalty = " << format_double(cfg.lake_hole_penalty) << '\n';
    out << "lake_min_start_dist = " << cfg.lake_min_start_dist << '\n';
    out << "lake_max_start_dist = " << cfg.lake_max_start_dist << '\n';
    out << "shop_catalog = " << cfg.shop_catalog << '\n';
    out << "shop_alpha = " << format_double(cfg.shop_alpha) << '\n';
    out << "shop_beta = " << format_double(cfg.shop_beta) << '\n';
    out << "ablate_seeds = " << cfg.ablate_seeds << '\n';
    out << "plot_window = " << cfg.plot_window << '\n';
    return out.str();
}

void validate_config(const RunConfig& cfg) {
    if (cfg.iterations < 1) throw ConfigError("config: iterations must be >= 1");
    if (cfg.tasks_per_iteration < 1) throw ConfigError("config: tasks_per_iteration must be >= 1");
    if (cfg.group_size < 1) throw ConfigError("config: group_size must be >= 1");
    if (cfg.horizon < 1) throw ConfigError("config: horizon must be >= 1");
    if (!(cfg.temperature > 0.0)) throw ConfigError("config: temperature must be positive");
    if (!(cfg.eval_temperature > 0.0))
        throw ConfigError("config: eval_temperature must be positive");
    if (!(cfg.retain_ratio > 0.0) || cfg.retain_ratio > 1.0)
        throw ConfigError("config: retain_ratio must be in (0, 1]");
    if (cfg.validation_tasks < 0) throw ConfigError("config: validation_tasks must be >= 0");
    if (cfg.eval_every < 1) throw ConfigError("config: eval_every must be >= 1");
    if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("config: learning_rate must be positive");
    if (cfg.minibatch_turns < 0) throw ConfigError("config: minibatch_turns must be >= 0");
    if (cfg.ablate_seeds < 1) throw ConfigError("config: ablate_seeds must be >= 1");
    if (cfg.plot_window < 1) throw ConfigError("config: plot_window must be >= 1");
}

}  // namespace tsr
