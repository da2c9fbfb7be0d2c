#pragma once

#include <string>
#include <vector>

namespace tsr {

// One line per iteration, self-describing key=value pairs, doubles at full
// precision. success_rate appears only on validation iterations and
// wall_clock_seconds only when timing is logged.
struct MetricRecord {
    int iteration = 0;
    double mean_return = 0.0;
    double rollout_entropy = 0.0;
    double grad_norm = 0.0;
    double mean_turns = 0.0;
    double mean_actions = 0.0;
    bool has_success = false;
    double success_rate = 0.0;
    bool has_wall_clock = false;
    double wall_clock_seconds = 0.0;
};

std::string format_metric(const MetricRecord& m);
MetricRecord parse_metric(const std::string& line);

std::string format_metric_log(const std::vector<MetricRecord>& metrics);
std::vector<MetricRecord> parse_metric_log(const std::string& text);

}  // namespace tsr
