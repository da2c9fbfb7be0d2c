#include "tsr/frozen_lake.hpp"

#include <array>
#include <cstdlib>
#include <sstream>

namespace tsr {

namespace {

constexpr std::array<int, 4> kRowDelta = {-1, 1, 0, 0};
constexpr std::array<int, 4> kColDelta = {0, 0, -1, 1};

// slip table: intended direction -> {intended, perpendicular, perpendicular}
constexpr std::array<std::array<int, 3>, 4> kSlip = {{
    {FrozenLakeEnv::kUp, FrozenLakeEnv::kLeft, FrozenLakeEnv::kRight},
    {FrozenLakeEnv::kDown, FrozenLakeEnv::kLeft, FrozenLakeEnv::kRight},
    {FrozenLakeEnv::kLeft, FrozenLakeEnv::kUp, FrozenLakeEnv::kDown},
    {FrozenLakeEnv::kRight, FrozenLakeEnv::kUp, FrozenLakeEnv::kDown},
}};

std::uint64_t reachable_from_goal(const FrozenLakeEnv::Map& m) {
    std::uint64_t seen = 1ULL << m.goal;
    std::vector<int> queue = {m.goal};
    while (!queue.empty()) {
        int c = queue.back();
        queue.pop_back();
        int row = c / m.size, col = c % m.size;
        for (int d = 0; d < 4; ++d) {
            int nrow = row + kRowDelta[d], ncol = col + kColDelta[d];
            if (nrow < 0 || nrow >= m.size || ncol < 0 || ncol >= m.size) continue;
            int n = nrow * m.size + ncol;
            if (m.hole_at(n) || ((seen >> n) & 1u)) continue;
            seen |= 1ULL << n;
            queue.push_back(n);
        }
    }
    return seen;
}

}  // namespace

FrozenLakeEnv::State FrozenLakeEnv::reset(std::uint64_t task_seed) const {
    rng::Stream layout(rng::derive(task_seed, rng::domain::kLayout));
    State s;
    s.map = generate(layout, cfg_);
    s.agent = s.map.start;
    s.status = StepStatus::Ongoing;
    s.steps = 0;
    s.stream = rng::Stream(rng::derive(task_seed, rng::domain::kTransition));
    return s;
}

FrozenLakeEnv::StepResult FrozenLakeEnv::step(State& s, int action) const {
    if (s.status != StepStatus::Ongoing)
        throw ContractViolation("frozen lake: step on terminal state");
    if (action < 0 || action >= 4)
        throw ContractViolation("frozen lake: action out of range");

    int realized = kSlip[action][s.stream.next_below(3)];
    int row = s.agent / s.map.size, col = s.agent % s.map.size;
    int nrow = row + kRowDelta[realized], ncol = col + kColDelta[realized];
    if (nrow >= 0 && nrow < s.map.size && ncol >= 0 && ncol < s.map.size)
        s.agent = nrow * s.map.size + ncol;

    StepResult r;
    if (s.agent == s.map.goal) {
        r.reward = 1.0;
        r.status = StepStatus::Success;
    } else if (s.map.hole_at(s.agent)) {
        r.reward = 0.0;
        r.status = StepStatus::Failure;
    }
    s.status = r.status;
    s.steps += 1;
    return r;
}

std::vector<double> FrozenLakeEnv::featurize(const State& s) const {
    int cells = s.map.size * s.map.size;
    std::vector<double> f(static_cast<std::size_t>(cells) * 2, 0.0);
    f[s.agent] = 1.0;
    for (int c = 0; c < cells; ++c)
        if (s.map.hole_at(c)) f[cells + c] = 1.0;
    return f;
}

double FrozenLakeEnv::turn_score(const State& prev, int action, const State& next,
                                 const StepResult& r) const {
    (void)prev;
    (void)action;
    (void)r;
    double s = -static_cast<double>(manhattan(next.map, next.agent, next.map.goal));
    if (next.map.hole_at(next.agent)) s -= cfg_.hole_penalty;
    return s;
}

int FrozenLakeEnv::manhattan(const Map& m, int a, int b) {
    return std::abs(a / m.size - b / m.size) + std::abs(a % m.size - b % m.size);
}

std::string FrozenLakeEnv::render(const Map& m) {
    std::string out;
    for (int row = 0; row < m.size; ++row) {
        for (int col = 0; col < m.size; ++col) {
            int c = row * m.size + col;
            char ch = 'F';
            if (c == m.start) ch = 'S';
            else if (c == m.goal) ch = 'G';
            else if (m.hole_at(c)) ch = 'H';
            out.push_back(ch);
        }
        out.push_back('\n');
    }
    return out;
}

FrozenLakeEnv::Map FrozenLakeEnv::parse(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) rows.push_back(line);
    if (rows.empty()) throw ConfigError("lake parse: empty map");

    Map m;
    m.size = static_cast<int>(rows.size());
    if (m.size > 8) throw ConfigError("lake parse: map over 64 cells");
    bool start_seen = false, goal_seen = false;
    for (int row = 0; row < m.size; ++row) {
        if (static_cast<int>(rows[row].size()) != m.size)
            throw ConfigError("lake parse: map not square");
        for (int col = 0; col < m.size; ++col) {
            int c = row * m.size + col;
            switch (rows[row][col]) {
                case 'S': m.start = c; start_seen = true; break;
                case 'G': m.goal = c; goal_seen = true; break;
                case 'H': m.holes |= 1ULL << c; break;
                case 'F': break;
                default: throw ConfigError("lake parse: bad cell char");
            }
        }
    }
    if (!start_seen || !goal_seen) throw ConfigError("lake parse: missing S or G");
    return m;
}

FrozenLakeEnv::Map FrozenLakeEnv::generate(rng::Stream& stream, const Config& cfg) {
    if (cfg.size < 2 || cfg.size > 8)
        throw ConfigError("lake generate: size out of range");

    for (int attempt = 0; attempt < 1000; ++attempt) {
        Map m;
        m.size = cfg.size;
        m.goal = cfg.size * cfg.size - 1;
        for (int c = 0; c < cfg.size * cfg.size; ++c) {
            if (c == m.goal) continue;
            if (stream.next_double() < cfg.hole_density) m.holes |= 1ULL << c;
        }
        if (m.holes == 0) continue;

        std::uint64_t safe = reachable_from_goal(m);
        std::vector<int> starts;
        for (int c = 0; c < cfg.size * cfg.size; ++c) {
            if (c == m.goal || !((safe >> c) & 1u)) continue;
            int d = manhattan(m, c, m.goal);
            if (d >= cfg.min_start_dist && d <= cfg.max_start_dist) starts.push_back(c);
        }
        if (starts.empty()) continue;
        m.start = starts[stream.next_below(starts.size())];
        return m;
    }
    throw NumericError("lake generate: no valid map after 1000 attempts");
}

}  // namespace tsr
