#pragma once

#include <string>
#include <vector>

#include "tsr/trajectory.hpp"

namespace tsr {

// One JSON object per line:
//   {"task_id":..,"seed":..,"terminal":"success","return":..,
//    "turns":[{"action":..,"reward":..,"score":..,"log_prob":..},..]}
// Features and masks are runtime-only and not serialized; doubles use
// shortest round-trip formatting, so parsed values are bit identical.
std::string trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const std::string& line);

std::string dump_trajectories(const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> parse_trajectory_dump(const std::string& text);

}  // namespace tsr
