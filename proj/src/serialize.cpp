#include "tsr/serialize.hpp"

#include <sstream>

#include "json.hpp"

namespace tsr {

using nlohmann::json;

std::string trajectory_to_json(const Trajectory& traj) {
    json turns = json::array();
    for (const TurnRecord& t : traj.turns) {
        turns.push_back({{"action", t.action},
                         {"reward", t.reward},
                         {"score", t.turn_score},
                         {"log_prob", t.log_prob}});
    }
    json j = {{"task_id", traj.task_id},
              {"seed", traj.seed},
              {"terminal", to_string(traj.terminal)},
              {"return", traj.return_value},
              {"turns", std::move(turns)}};
    return j.dump();
}

Trajectory trajectory_from_json(const std::string& line) {
    json j = json::parse(line);
    Trajectory traj;
    traj.task_id = j.at("task_id").get<std::uint64_t>();
    traj.seed = j.at("seed").get<std::uint64_t>();
    traj.terminal = terminal_from_string(j.at("terminal").get<std::string>());
    traj.return_value = j.at("return").get<double>();
    for (const json& t : j.at("turns")) {
        TurnRecord turn;
        turn.action = t.at("action").get<int>();
        turn.reward = t.at("reward").get<double>();
        turn.turn_score = t.at("score").get<double>();
        turn.log_prob = t.at("log_prob").get<double>();
        traj.turns.push_back(std::move(turn));
    }
    return traj;
}

std::string dump_trajectories(const std::vector<Trajectory>& trajectories) {
    std::string out;
    for (const Trajectory& t : trajectories) {
        out += trajectory_to_json(t);
        out.push_back('\n');
    }
    return out;
}

std::vector<Trajectory> parse_trajectory_dump(const std::string& text) {
    std::vector<Trajectory> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(trajectory_from_json(line));
    return out;
}

}  // namespace tsr
