#include "tsr/minishop.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tsr {

namespace {

// token id layout: 6 colors, 4 sizes, 6 categories, 6 fillers, 3 page words
constexpr int kColorBase = 0, kColorCount = 6;
constexpr int kSizeBase = 6, kSizeCount = 4;
constexpr int kCategoryBase = 10, kCategoryCount = 6;
constexpr int kFillerBase = 16, kFillerCount = 6;
constexpr int kWordSearch = 22, kWordOrder = 23, kWordConfirmed = 24;

const std::vector<std::string> kVocab = {
    "red",    "blue",   "green", "black",  "white", "beige",    // colors
    "small",  "medium", "large", "xl",                          // sizes
    "pillow", "lamp",   "shirt", "mug",    "rug",   "chair",    // categories
    "classic", "deluxe", "soft", "modern", "cozy",  "premium",  // fillers
    "search", "order",  "confirmed",
};

std::uint32_t bit(int token) { return 1u << token; }

double round_cents(double x) { return std::round(x * 100.0) / 100.0; }

// draw `count` distinct token ids from [base, base+range)
std::vector<std::uint8_t> draw_distinct(rng::Stream& stream, int base, int range, int count) {
    std::vector<std::uint8_t> pool(static_cast<std::size_t>(range));
    std::iota(pool.begin(), pool.end(), static_cast<std::uint8_t>(base));
    std::vector<std::uint8_t> out;
    for (int i = 0; i < count; ++i) {
        std::size_t pick = stream.next_below(pool.size());
        out.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<long>(pick));
    }
    return out;
}

int item_action_count(const MiniShopEnv::Item& item) {
    // colors, sizes, buy, back
    return static_cast<int>(item.colors.size() + item.sizes.size()) + 2;
}

}  // namespace

MiniShopEnv::State MiniShopEnv::reset(std::uint64_t task_seed) const {
    rng::Stream layout(rng::derive(task_seed, rng::domain::kLayout));
    State s;
    auto catalog = std::make_shared<Catalog>(generate_catalog(layout, cfg_.catalog_size));
    s.instr = generate_instruction(layout, *catalog);
    s.catalog = std::move(catalog);
    s.stream = rng::Stream(rng::derive(task_seed, rng::domain::kTransition));
    return s;
}

MiniShopEnv::StepResult MiniShopEnv::step(State& s, int action) const {
    if (s.status != StepStatus::Ongoing)
        throw ContractViolation("minishop: step on terminal state");
    auto mask = action_mask(s);
    if (action < 0 || action >= kActionCount || !mask[static_cast<std::size_t>(action)])
        throw ContractViolation("minishop: action invalid for current page");

    StepResult r;
    const Catalog& cat = *s.catalog;

    switch (s.page) {
        case Page::SearchHome: {
            s.result_ids = search(cat, query_tokens(s.instr, action));
            s.page = Page::Results;
            s.milestones |= kReachedResults;
            break;
        }
        case Page::Results: {
            if (action == kMaxResults) {  // back to search
                s.result_ids.clear();
                s.page = Page::SearchHome;
                break;
            }
            s.item_id = s.result_ids[static_cast<std::size_t>(action)];
            s.selected_color = -1;
            s.selected_size = -1;
            s.page = Page::Item;
            if (item_matches(cat[static_cast<std::size_t>(s.item_id)], s.instr))
                s.milestones |= kOpenedMatch;
            break;
        }
        case Page::Item: {
            const Item& item = cat[static_cast<std::size_t>(s.item_id)];
            int nc = static_cast<int>(item.colors.size());
            int ns = static_cast<int>(item.sizes.size());
            if (action < nc) {
                s.selected_color = item.colors[static_cast<std::size_t>(action)];
            } else if (action < nc + ns) {
                s.selected_size = item.sizes[static_cast<std::size_t>(action - nc)];
            } else if (action == nc + ns) {  // buy
                int satisfied = 0;
                if (s.selected_color == s.instr.color) ++satisfied;
                if (s.selected_size == s.instr.size) ++satisfied;
                if (item.category == s.instr.category) ++satisfied;
                if (item.price <= s.instr.price_cap) ++satisfied;
                r.reward = satisfied / 4.0;
                r.status = satisfied == 4 ? StepStatus::Success : StepStatus::Failure;
                s.page = Page::Confirmation;
                s.milestones |= kConfirmed;
            } else {  // back to results
                s.item_id = -1;
                s.page = Page::Results;
            }
            if (s.page == Page::Item && s.selected_color >= 0 && s.selected_size >= 0)
                s.milestones |= kOptionsDone;
            break;
        }
        case Page::Confirmation:
            throw ContractViolation("minishop: step on terminal page");
    }

    s.status = r.status;
    s.steps += 1;
    return r;
}

std::vector<double> MiniShopEnv::featurize(const State& s) const {
    std::vector<double> f(16, 0.0);
    f[static_cast<std::size_t>(s.page)] = 1.0;
    for (int m = 0; m < 4; ++m)
        if (s.milestones & (1u << m)) f[static_cast<std::size_t>(4 + m)] = 1.0;
    f[8] = jaccard(s.instr.tokens, page_tokens(s));
    f[9] = s.selected_color == s.instr.color ? 1.0 : 0.0;
    f[10] = s.selected_size == s.instr.size ? 1.0 : 0.0;
    if (s.page == Page::Item) {
        const Item& item = (*s.catalog)[static_cast<std::size_t>(s.item_id)];
        f[11] = item.category == s.instr.category ? 1.0 : 0.0;
        f[12] = std::count(item.colors.begin(), item.colors.end(), s.instr.color) ? 1.0 : 0.0;
        f[13] = std::count(item.sizes.begin(), item.sizes.end(), s.instr.size) ? 1.0 : 0.0;
        f[14] = item.price <= s.instr.price_cap ? 1.0 : 0.0;
    }
    f[15] = 1.0;  // bias
    return f;
}

double MiniShopEnv::turn_score(const State& prev, int action, const State& next,
                               const StepResult& r) const {
    (void)action;
    (void)r;
    double milestone = next.milestones != prev.milestones ? 1.0 : 0.0;
    return cfg_.alpha * milestone + cfg_.beta * jaccard(next.instr.tokens, page_tokens(next));
}

std::vector<bool> MiniShopEnv::action_mask(const State& s) const {
    std::vector<bool> mask(kActionCount, false);
    switch (s.page) {
        case Page::SearchHome:
            for (int a = 0; a < kQueryTemplates; ++a) mask[static_cast<std::size_t>(a)] = true;
            break;
        case Page::Results:
            for (std::size_t a = 0; a < s.result_ids.size(); ++a) mask[a] = true;
            mask[kMaxResults] = true;  // back
            break;
        case Page::Item: {
            const Item& item = (*s.catalog)[static_cast<std::size_t>(s.item_id)];
            for (int a = 0; a < item_action_count(item); ++a)
                mask[static_cast<std::size_t>(a)] = true;
            break;
        }
        case Page::Confirmation:
            break;
    }
    return mask;
}

MiniShopEnv::Catalog MiniShopEnv::generate_catalog(rng::Stream& stream, int count) {
    if (count < 1) throw ConfigError("minishop: catalog size must be positive");
    Catalog cat;
    cat.reserve(static_cast<std::size_t>(count));
    for (int id = 0; id < count; ++id) {
        Item item;
        item.id = id;
        item.category =
            static_cast<std::uint8_t>(kCategoryBase + stream.next_below(kCategoryCount));
        item.colors = draw_distinct(stream, kColorBase, kColorCount,
                                    1 + static_cast<int>(stream.next_below(3)));
        item.sizes = draw_distinct(stream, kSizeBase, kSizeCount,
                                   1 + static_cast<int>(stream.next_below(3)));
        item.price = round_cents(5.0 + stream.next_double() * 95.0);
        auto fillers = draw_distinct(stream, kFillerBase, kFillerCount,
                                     1 + static_cast<int>(stream.next_below(2)));
        item.title = bit(item.category);
        for (auto c : item.colors) item.title |= bit(c);
        for (auto z : item.sizes) item.title |= bit(z);
        for (auto w : fillers) item.title |= bit(w);
        cat.push_back(std::move(item));
    }
    return cat;
}

MiniShopEnv::Instruction MiniShopEnv::generate_instruction(rng::Stream& stream,
                                                           const Catalog& catalog) {
    if (catalog.empty()) throw ConfigError("minishop: empty catalog");
    const Item& target = catalog[stream.next_below(catalog.size())];
    Instruction instr;
    instr.target_id = target.id;
    instr.color = target.colors[stream.next_below(target.colors.size())];
    instr.size = target.sizes[stream.next_below(target.sizes.size())];
    instr.category = target.category;
    instr.price_cap = round_cents(target.price + stream.next_double() * 20.0);
    instr.tokens = bit(instr.color) | bit(instr.size) | bit(instr.category);
    return instr;
}

bool MiniShopEnv::item_matches(const Item& item, const Instruction& instr) {
    return item.category == instr.category && item.price <= instr.price_cap &&
           std::count(item.colors.begin(), item.colors.end(), instr.color) > 0 &&
           std::count(item.sizes.begin(), item.sizes.end(), instr.size) > 0;
}

std::uint32_t MiniShopEnv::query_tokens(const Instruction& instr, int template_index) {
    switch (template_index) {
        case 0: return bit(instr.category);
        case 1: return bit(instr.color);
        case 2: return bit(instr.color) | bit(instr.category);
        case 3: return bit(instr.size) | bit(instr.category);
        case 4: return bit(instr.color) | bit(instr.size) | bit(instr.category);
        default: throw ContractViolation("minishop: bad query template");
    }
}

std::vector<int> MiniShopEnv::search(const Catalog& catalog, std::uint32_t query) {
    std::vector<int> order(catalog.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        int oa = std::popcount(catalog[static_cast<std::size_t>(a)].title & query);
        int ob = std::popcount(catalog[static_cast<std::size_t>(b)].title & query);
        if (oa != ob) return oa > ob;
        return a < b;
    });
    if (order.size() > kMaxResults) order.resize(kMaxResults);
    return order;
}

std::uint32_t MiniShopEnv::page_tokens(const State& s) {
    const Catalog& cat = *s.catalog;
    switch (s.page) {
        case Page::SearchHome:
            return bit(kWordSearch);
        case Page::Results: {
            std::uint32_t t = 0;
            for (int id : s.result_ids) t |= cat[static_cast<std::size_t>(id)].title;
            return t;
        }
        case Page::Item:
            return cat[static_cast<std::size_t>(s.item_id)].title;
        case Page::Confirmation:
            return bit(kWordOrder) | bit(kWordConfirmed) |
                   cat[static_cast<std::size_t>(s.item_id)].title;
    }
    return 0;
}

double MiniShopEnv::jaccard(std::uint32_t a, std::uint32_t b) {
    std::uint32_t u = a | b;
    if (u == 0) return 0.0;
    return static_cast<double>(std::popcount(a & b)) / static_cast<double>(std::popcount(u));
}

const std::vector<std::string>& MiniShopEnv::vocabulary() { return kVocab; }

std::string MiniShopEnv::tokens_to_text(std::uint32_t mask) {
    std::string out;
    for (std::size_t t = 0; t < kVocab.size(); ++t) {
        if (!(mask & bit(static_cast<int>(t)))) continue;
        if (!out.empty()) out.push_back(' ');
        out += kVocab[t];
    }
    return out;
}

std::uint32_t MiniShopEnv::text_to_tokens(const std::string& words) {
    std::uint32_t mask = 0;
    std::istringstream in(words);
    for (std::string w; in >> w;) {
        auto it = std::find(kVocab.begin(), kVocab.end(), w);
        if (it == kVocab.end()) throw ConfigError("minishop: unknown token " + w);
        mask |= bit(static_cast<int>(it - kVocab.begin()));
    }
    return mask;
}

std::string MiniShopEnv::save_catalog(const Catalog& catalog) {
    std::ostringstream out;
    for (const Item& item : catalog) {
        out << item.id << '\t' << tokens_to_text(item.title) << '\t';
        std::uint32_t colors = 0, sizes = 0;
        for (auto c : item.colors) colors |= bit(c);
        for (auto z : item.sizes) sizes |= bit(z);
        out << tokens_to_text(colors) << '\t' << tokens_to_text(sizes) << '\t'
            << kVocab[item.category] << '\t' << item.price << '\n';
    }
    return out.str();
}

MiniShopEnv::Catalog MiniShopEnv::load_catalog(const std::string& text) {
    Catalog cat;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string id_s, title_s, colors_s, sizes_s, category_s, price_s;
        if (!std::getline(fields, id_s, '\t') || !std::getline(fields, title_s, '\t') ||
            !std::getline(fields, colors_s, '\t') || !std::getline(fields, sizes_s, '\t') ||
            !std::getline(fields, category_s, '\t') || !std::getline(fields, price_s))
            throw ConfigError("minishop: bad catalog line: " + line);
        Item item;
        item.id = std::stoi(id_s);
        item.title = text_to_tokens(title_s);
        std::uint32_t colors = text_to_tokens(colors_s);
        for (int t = kColorBase; t < kColorBase + kColorCount; ++t)
            if (colors & bit(t)) item.colors.push_back(static_cast<std::uint8_t>(t));
        std::uint32_t sizes = text_to_tokens(sizes_s);
        for (int t = kSizeBase; t < kSizeBase + kSizeCount; ++t)
            if (sizes & bit(t)) item.sizes.push_back(static_cast<std::uint8_t>(t));
        std::uint32_t category = text_to_tokens(category_s);
        item.category = static_cast<std::uint8_t>(std::countr_zero(category));
        item.price = std::stod(price_s);
        cat.push_back(std::move(item));
    }
    return cat;
}

std::string MiniShopEnv::save_instruction(const Instruction& instr) {
    std::ostringstream out;
    out << kVocab[instr.color] << '\t' << kVocab[instr.size] << '\t' << kVocab[instr.category]
        << '\t' << instr.price_cap << '\t' << instr.target_id;
    return out.str();
}

MiniShopEnv::Instruction MiniShopEnv::load_instruction(const std::string& line) {
    std::istringstream fields(line);
    std::string color_s, size_s, category_s, cap_s, target_s;
    if (!std::getline(fields, color_s, '\t') || !std::getline(fields, size_s, '\t') ||
        !std::getline(fields, category_s, '\t') || !std::getline(fields, cap_s, '\t') ||
        !std::getline(fields, target_s))
        throw ConfigError("minishop: bad instruction line: " + line);
    Instruction instr;
    instr.color = static_cast<std::uint8_t>(std::countr_zero(text_to_tokens(color_s)));
    instr.size = static_cast<std::uint8_t>(std::countr_zero(text_to_tokens(size_s)));
    instr.category = static_cast<std::uint8_t>(std::countr_zero(text_to_tokens(category_s)));
    instr.price_cap = std::stod(cap_s);
    instr.target_id = std::stoi(target_s);
    instr.tokens = (1u << instr.color) | (1u << instr.size) | (1u << instr.category);
    return instr;
}

}  // namespace tsr
