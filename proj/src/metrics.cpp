#include "tsr/metrics.hpp"

#include <sstream>

#include "tsr/trajectory.hpp"

namespace tsr {

namespace {

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

}  // namespace

std::string format_metric(const MetricRecord& m) {
    std::ostringstream out;
    out << "iteration=" << m.iteration;
    out << " mean_return=" << fmt(m.mean_return);
    out << " rollout_entropy=" << fmt(m.rollout_entropy);
    out << " grad_norm=" << fmt(m.grad_norm);
    out << " mean_turns=" << fmt(m.mean_turns);
    out << " mean_actions=" << fmt(m.mean_actions);
    if (m.has_success) out << " success_rate=" << fmt(m.success_rate);
    if (m.has_wall_clock) out << " wall_clock_seconds=" << fmt(m.wall_clock_seconds);
    return out.str();
}

MetricRecord parse_metric(const std::string& line) {
    MetricRecord m;
    bool saw_iteration = false;
    std::istringstream in(line);
    for (std::string tok; in >> tok;) {
        std::size_t eq = tok.find('=');
        if (eq == std::string::npos)
            throw ConfigError("metric: token without '=': " + tok);
        std::string key = tok.substr(0, eq);
        std::string value = tok.substr(eq + 1);
        try {
            if (key == "iteration") {
                m.iteration = std::stoi(value);
                saw_iteration = true;
            } else if (key == "mean_return") m.mean_return = std::stod(value);
            else if (key == "rollout_entropy") m.rollout_entropy = std::stod(value);
            else if (key == "grad_norm") m.grad_norm = std::stod(value);
            else if (key == "mean_turns") m.mean_turns = std::stod(value);
            else if (key == "mean_actions") m.mean_actions = std::stod(value);
            else if (key == "success_rate") {
                m.success_rate = std::stod(value);
                m.has_success = true;
            } else if (key == "wall_clock_seconds") {
                m.wall_clock_seconds = std::stod(value);
                m.has_wall_clock = true;
            } else {
                throw ConfigError("metric: unknown key: " + key);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("metric: bad value in token: " + tok);
        }
    }
    if (!saw_iteration) throw ConfigError("metric: line has no iteration field");
    return m;
}

std::string format_metric_log(const std::vector<MetricRecord>& metrics) {
    std::string out;
    for (const MetricRecord& m : metrics) {
        out += format_metric(m);
        out.push_back('\n');
    }
    return out;
}

std::vector<MetricRecord> parse_metric_log(const std::string& text) {
    std::vector<MetricRecord> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(parse_metric(line));
    return out;
}

}  // namespace tsr
