#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tsr/rng.hpp"
#include "tsr/trajectory.hpp"

namespace tsr {

// Four-page shopping environment: SearchHome -> Results -> Item ->
// Confirmation. Tokens come from a small fixed vocabulary and token sets
// are bitmasks, so similarity is popcount arithmetic. The only reward is
// on buy: the fraction of the four instruction constraints (color, size,
// category, price cap) the purchase satisfies. Per-turn scores pay a
// once-per-episode milestone bonus plus instruction/page token overlap.
class MiniShopEnv {
  public:
    enum class Page { SearchHome, Results, Item, Confirmation };

    // milestone bits
    static constexpr std::uint8_t kReachedResults = 1;
    static constexpr std::uint8_t kOpenedMatch = 2;
    static constexpr std::uint8_t kOptionsDone = 4;
    static constexpr std::uint8_t kConfirmed = 8;

    static constexpr int kMaxResults = 10;
    static constexpr int kQueryTemplates = 5;
    static constexpr int kActionCount = 11;  // widest page: 10 item slots + back

    struct Item {
        int id = 0;
        std::uint32_t title = 0;           // token bitmask
        std::uint8_t category = 0;         // token id
        std::vector<std::uint8_t> colors;  // offered color variants, token ids
        std::vector<std::uint8_t> sizes;
        double price = 0.0;

        bool operator==(const Item&) const = default;
    };

    using Catalog = std::vector<Item>;

    struct Instruction {
        std::uint8_t color = 0;
        std::uint8_t size = 0;
        std::uint8_t category = 0;
        double price_cap = 0.0;
        std::uint32_t tokens = 0;  // color | size | category
        int target_id = 0;         // item the instruction was derived from

        bool operator==(const Instruction&) const = default;
    };

    struct Config {
        int catalog_size = 200;
        double alpha = 1.0;  // milestone bonus weight
        double beta = 1.0;   // token similarity weight
        int horizon = 10;
    };

    struct State {
        std::shared_ptr<const Catalog> catalog;
        Instruction instr;
        Page page = Page::SearchHome;
        std::vector<int> result_ids;
        int item_id = -1;
        int selected_color = -1;  // token id, -1 until clicked
        int selected_size = -1;
        std::uint8_t milestones = 0;
        StepStatus status = StepStatus::Ongoing;
        int steps = 0;
        rng::Stream stream;  // dynamics are deterministic; kept for branching
    };

    struct StepResult {
        double reward = 0.0;
        StepStatus status = StepStatus::Ongoing;
    };

    MiniShopEnv() = default;
    explicit MiniShopEnv(const Config& cfg) : cfg_(cfg) {}

    const Config& config() const { return cfg_; }

    EnvSpec spec() const { return {kActionCount, cfg_.horizon, 16, false}; }

    State reset(std::uint64_t task_seed) const;
    StepResult step(State& s, int action) const;
    std::vector<double> featurize(const State& s) const;
    double turn_score(const State& prev, int action, const State& next,
                      const StepResult& r) const;

    // valid actions for the current page; all false on Confirmation
    std::vector<bool> action_mask(const State& s) const;

    static Catalog generate_catalog(rng::Stream& stream, int count);
    static Instruction generate_instruction(rng::Stream& stream, const Catalog& catalog);

    // the item can satisfy every constraint with the right option clicks
    static bool item_matches(const Item& item, const Instruction& instr);

    static std::uint32_t query_tokens(const Instruction& instr, int template_index);
    static std::vector<int> search(const Catalog& catalog, std::uint32_t query);
    static std::uint32_t page_tokens(const State& s);
    static double jaccard(std::uint32_t a, std::uint32_t b);

    // vocabulary helpers
    static const std::vector<std::string>& vocabulary();
    static std::string tokens_to_text(std::uint32_t mask);
    static std::uint32_t text_to_tokens(const std::string& words);

    // line-based serialization, one item or instruction per line
    static std::string save_catalog(const Catalog& catalog);
    static Catalog load_catalog(const std::string& text);
    static std::string save_instruction(const Instruction& instr);
    static Instruction load_instruction(const std::string& line);

  private:
    Config cfg_;
};

}  // namespace tsr
