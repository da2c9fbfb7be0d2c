#include "tsr/sokoban.hpp"

#include <array>
#include <bit>
#include <sstream>

namespace tsr {

namespace {

constexpr std::array<int, 4> kRowDelta = {-1, 1, 0, 0};  // up, down, left, right
constexpr std::array<int, 4> kColDelta = {0, 0, -1, 1};

bool in_bounds(const SokobanEnv::Board& b, int row, int col) {
    return row >= 0 && row < b.height && col >= 0 && col < b.width;
}

// out-of-bounds counts as wall so the checks below never index outside
bool blocked_by_wall(const SokobanEnv::Board& b, int row, int col) {
    if (!in_bounds(b, row, col)) return true;
    return b.wall_at(b.cell(row, col));
}

bool free_floor(const SokobanEnv::Board& b, int row, int col) {
    if (!in_bounds(b, row, col)) return false;
    int c = b.cell(row, col);
    return !b.wall_at(c) && !b.box_at(c);
}

}  // namespace

SokobanEnv::State SokobanEnv::reset(std::uint64_t task_seed) const {
    rng::Stream layout(rng::derive(task_seed, rng::domain::kLayout));
    State s;
    s.board = generate(layout, cfg_);
    s.status = is_solved(s.board) ? StepStatus::Success : StepStatus::Ongoing;
    s.steps = 0;
    s.stream = rng::Stream(rng::derive(task_seed, rng::domain::kTransition));
    return s;
}

SokobanEnv::StepResult SokobanEnv::step(State& s, int action) const {
    if (s.status != StepStatus::Ongoing)
        throw ContractViolation("sokoban: step on terminal state");
    if (action < 0 || action >= 4)
        throw ContractViolation("sokoban: action out of range");

    Board& b = s.board;
    int row = b.agent / b.width, col = b.agent % b.width;
    int nrow = row + kRowDelta[action], ncol = col + kColDelta[action];

    int before_on = std::popcount(b.boxes & b.targets);

    if (!blocked_by_wall(b, nrow, ncol)) {
        int dest = b.cell(nrow, ncol);
        if (b.box_at(dest)) {
            int brow = nrow + kRowDelta[action], bcol = ncol + kColDelta[action];
            if (free_floor(b, brow, bcol)) {
                b.boxes &= ~(1ULL << dest);
                b.boxes |= 1ULL << b.cell(brow, bcol);
                b.agent = dest;
            }
            // blocked push: no-op move
        } else {
            b.agent = dest;
        }
    }

    int after_on = std::popcount(b.boxes & b.targets);
    bool complete = is_solved(b);

    StepResult r;
    r.reward = static_cast<double>(after_on - before_on) + (complete ? 10.0 : 0.0) - 0.1;
    r.status = complete ? StepStatus::Success : StepStatus::Ongoing;

    s.status = r.status;
    s.steps += 1;
    return r;
}

std::vector<double> SokobanEnv::featurize(const State& s) const {
    const Board& b = s.board;
    int cells = b.width * b.height;
    std::vector<double> f(static_cast<std::size_t>(cells) * 4, 0.0);
    // channel order: walls, boxes, targets, agent; row-major within a channel
    for (int c = 0; c < cells; ++c) {
        if (b.wall_at(c)) f[c] = 1.0;
        if (b.box_at(c)) f[cells + c] = 1.0;
        if (b.target_at(c)) f[2 * cells + c] = 1.0;
    }
    f[3 * cells + b.agent] = 1.0;
    return f;
}

bool SokobanEnv::is_deadlocked(const Board& b) {
    std::uint64_t off_target = b.boxes & ~b.targets;
    while (off_target) {
        int c = std::countr_zero(off_target);
        off_target &= off_target - 1;
        int row = c / b.width, col = c % b.width;
        bool up = blocked_by_wall(b, row - 1, col);
        bool down = blocked_by_wall(b, row + 1, col);
        bool left = blocked_by_wall(b, row, col - 1);
        bool right = blocked_by_wall(b, row, col + 1);
        if ((up || down) && (left || right)) return true;
    }
    return false;
}

std::string SokobanEnv::render(const Board& b) {
    std::string out;
    out.reserve(static_cast<std::size_t>((b.width + 1) * b.height));
    for (int row = 0; row < b.height; ++row) {
        for (int col = 0; col < b.width; ++col) {
            int c = b.cell(row, col);
            char ch = '.';
            if (b.wall_at(c)) ch = '#';
            else if (b.box_at(c)) ch = b.target_at(c) ? '*' : 'B';
            else if (c == b.agent) ch = b.target_at(c) ? '+' : 'A';
            else if (b.target_at(c)) ch = 'T';
            out.push_back(ch);
        }
        out.push_back('\n');
    }
    return out;
}

SokobanEnv::Board SokobanEnv::parse(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) rows.push_back(line);
    if (rows.empty()) throw ConfigError("sokoban parse: empty board");

    Board b;
    b.height = static_cast<int>(rows.size());
    b.width = static_cast<int>(rows[0].size());
    if (b.width * b.height > 64) throw ConfigError("sokoban parse: board over 64 cells");

    bool agent_seen = false;
    for (int row = 0; row < b.height; ++row) {
        if (static_cast<int>(rows[row].size()) != b.width)
            throw ConfigError("sokoban parse: ragged rows");
        for (int col = 0; col < b.width; ++col) {
            int c = b.cell(row, col);
            switch (rows[row][col]) {
                case '#': b.walls |= 1ULL << c; break;
                case 'B': b.boxes |= 1ULL << c; break;
                case '*': b.boxes |= 1ULL << c; b.targets |= 1ULL << c; break;
                case 'T': b.targets |= 1ULL << c; break;
                case 'A': b.agent = c; agent_seen = true; break;
                case '+': b.agent = c; b.targets |= 1ULL << c; agent_seen = true; break;
                case '.': break;
                default: throw ConfigError("sokoban parse: bad cell char");
            }
        }
    }
    if (!agent_seen) throw ConfigError("sokoban parse: no agent");
    return b;
}

SokobanEnv::Board SokobanEnv::generate(rng::Stream& stream, const Config& cfg) {
    if (cfg.width < 3 || cfg.height < 3)
        throw ConfigError("sokoban generate: board too small");
    if (cfg.width * cfg.height > 64)
        throw ConfigError("sokoban generate: board over 64 cells");

    std::vector<int> interior;
    for (int row = 1; row < cfg.height - 1; ++row)
        for (int col = 1; col < cfg.width - 1; ++col)
            interior.push_back(row * cfg.width + col);
    if (cfg.num_boxes < 1 || cfg.num_boxes + 1 > static_cast<int>(interior.size()))
        throw ConfigError("sokoban generate: boxes do not fit the interior");

    for (int attempt = 0; attempt < 200; ++attempt) {
        Board b;
        b.width = cfg.width;
        b.height = cfg.height;
        for (int row = 0; row < cfg.height; ++row)
            for (int col = 0; col < cfg.width; ++col)
                if (row == 0 || col == 0 || row == cfg.height - 1 || col == cfg.width - 1)
                    b.walls |= 1ULL << b.cell(row, col);

        // solved placement: boxes sit on the targets
        std::vector<int> cells = interior;
        for (int i = 0; i < cfg.num_boxes; ++i) {
            std::size_t pick = stream.next_below(cells.size());
            int c = cells[pick];
            cells.erase(cells.begin() + static_cast<long>(pick));
            b.targets |= 1ULL << c;
            b.boxes |= 1ULL << c;
        }
        b.agent = cells[stream.next_below(cells.size())];

        // reverse play: walks and pulls only, so replaying the inverse
        // moves forward solves the board
        for (int step_i = 0; step_i < cfg.pull_steps; ++step_i) {
            int arow = b.agent / b.width, acol = b.agent % b.width;
            std::vector<int> pulls, walks;
            for (int d = 0; d < 4; ++d) {
                int nrow = arow + kRowDelta[d], ncol = acol + kColDelta[d];
                if (!free_floor(b, nrow, ncol)) continue;
                walks.push_back(d);
                int brow = arow - kRowDelta[d], bcol = acol - kColDelta[d];
                if (in_bounds(b, brow, bcol) && b.box_at(b.cell(brow, bcol)))
                    pulls.push_back(d);
            }
            bool do_pull = !pulls.empty() && (walks.empty() || stream.next_double() < 0.6);
            if (!do_pull && walks.empty()) break;
            int d = do_pull ? pulls[stream.next_below(pulls.size())]
                            : walks[stream.next_below(walks.size())];
            int dest = b.cell(arow + kRowDelta[d], acol + kColDelta[d]);
            if (do_pull) {
                int box = b.cell(arow - kRowDelta[d], acol - kColDelta[d]);
                b.boxes &= ~(1ULL << box);
                b.boxes |= 1ULL << b.agent;
            }
            b.agent = dest;
        }

        if (cfg.pull_steps == 0 || !is_solved(b)) return b;
    }
    throw NumericError("sokoban generate: no unsolved start after 200 attempts");
}

SokobanEnv::Board SokobanEnv::pillar_trap_board() {
    return parse(
        "#####\n"
        "#..##\n"
        "#AB.#\n"
        "#..T#\n"
        "#####\n");
}

}  // namespace tsr
