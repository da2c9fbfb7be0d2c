#include "tsr/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsr {

double outcome_uncertainty(const std::vector<double>& returns) {
    if (returns.empty()) throw ContractViolation("uncertainty of an empty group");
    double mean = std::accumulate(returns.begin(), returns.end(), 0.0) /
                  static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    var /= static_cast<double>(returns.size());
    return std::sqrt(var);
}

std::vector<int> filter_groups(const std::vector<double>& uncertainties, double retain_ratio) {
    if (uncertainties.empty()) throw ContractViolation("filter on an empty batch");
    if (!(retain_ratio > 0.0) || retain_ratio > 1.0)
        throw ConfigError("filter: retain_ratio must be in (0, 1]");

    auto p = static_cast<int>(uncertainties.size());
    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        double ua = uncertainties[static_cast<std::size_t>(a)];
        double ub = uncertainties[static_cast<std::size_t>(b)];
        if (ua != ub) return ua > ub;
        return a < b;
    });

    int keep = std::max(1, static_cast<int>(std::floor(retain_ratio * p)));
    keep = std::min(keep, p);
    std::vector<int> retained(order.begin(), order.begin() + keep);
    std::sort(retained.begin(), retained.end());
    return retained;
}

}  // namespace tsr
