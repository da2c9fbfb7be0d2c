#pragma once

#include <vector>

#include "tsr/trajectory.hpp"

namespace tsr {

// population standard deviation of a group's returns
double outcome_uncertainty(const std::vector<double>& returns);

// Indices of the retained groups, ascending. Groups are ranked by
// uncertainty descending with ties broken by group index ascending, and
// the top max(1, floor(retain_ratio * P)) survive.
std::vector<int> filter_groups(const std::vector<double>& uncertainties, double retain_ratio);

}  // namespace tsr
