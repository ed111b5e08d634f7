#include "matcha/rank_reflect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <set>

#include "matcha/errors.hpp"
#include "matcha/rng.hpp"
#include "matcha/text.hpp"

namespace matcha {

namespace {

template <std::size_t N>
std::array<double, N> normalized(const std::array<double, N>& w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = w[i] / total;
    return out;
}

std::string join_set(const std::set<std::string>& xs) {
    return text::join(std::vector<std::string>(xs.begin(), xs.end()), ", ");
}

}  // namespace

ScoreCard parse_score_card(std::string_view response, std::vector<std::string>* notes) {
    static const std::regex kPair(R"(([A-Za-z_]+)\s*=\s*(-?\d+))");
    ScoreCard card;
    std::array<bool, kNumDimensions> seen{};
    const std::string s(response);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), kPair); it != std::sregex_iterator(); ++it) {
        const auto name = text::to_lower((*it)[1].str());
        const auto pos = std::find(kDimensionNames.begin(), kDimensionNames.end(), name);
        if (pos == kDimensionNames.end()) continue;
        const auto d = static_cast<std::size_t>(pos - kDimensionNames.begin());
        double v = 0.0;
        try {
            v = std::stod((*it)[2].str());
        } catch (const std::exception&) {
            continue;
        }
        card.values[d] = std::clamp(v, ScoreCard::kMin, ScoreCard::kMax);
        seen[d] = true;
    }
    for (std::size_t d = 0; d < kNumDimensions; ++d)
        if (!seen[d] && notes) notes->push_back("missing " + std::string(kDimensionNames[d]) + ", using neutral 5");
    return card;
}

void validate(const RankingConfig& cfg) {
    for (const auto& id : cfg.provider_ids)
        if (id.empty()) throw ConfigError("ranking needs two provider ids");
    for (double w : cfg.provider_weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("provider weights must be non-negative");
    for (double w : cfg.dimension_weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("dimension weights must be non-negative");
    if (cfg.provider_weights[0] + cfg.provider_weights[1] <= 0.0)
        throw ConfigError("provider weights must not both be zero");
    if (std::accumulate(cfg.dimension_weights.begin(), cfg.dimension_weights.end(), 0.0) <= 0.0)
        throw ConfigError("dimension weights must not all be zero");
    if (cfg.exploration_rate < 0.0 || cfg.exploration_rate > 1.0)
        throw ConfigError("exploration_rate must be in [0,1]");
    if (cfg.reflection_depth == 0) throw ConfigError("reflection_depth must be positive");
}

double combine_scores(const std::array<ScoreCard, 2>& cards, const RankingConfig& cfg) {
    const auto pw = normalized(cfg.provider_weights);
    const auto dw = normalized(cfg.dimension_weights);
    double fused = 0.0;
    for (std::size_t p = 0; p < 2; ++p) {
        double mean = 0.0;
        for (std::size_t d = 0; d < kNumDimensions; ++d) mean += dw[d] * cards[p].values[d];
        fused += pw[p] * mean;
    }
    return fused;
}

std::string score_prompt(const UserIntent& intent, std::string_view game_id, const AgentContext& ctx) {
    return std::string(game_id) + "\n" +
           ctx.prompts.render("rank.user", {{"query", intent.free_text},
                                            {"intent", summarize(intent, ctx.catalog())},
                                            {"info", ctx.toolbox.get_game_info_str(game_id)}});
}

ScoreCard score_with_provider(const AgentContext& ctx, const std::string& provider_id, const UserIntent& intent,
                              std::string_view game_id, std::vector<std::string>* notes) {
    if (!ctx.catalog().contains(game_id)) throw NotFound(std::string(game_id));
    try {
        auto resp = ctx.gateway.complete(make_request(provider_id, "rank", score_prompt(intent, game_id, ctx)));
        return parse_score_card(resp.content, notes);
    } catch (const ProviderFailure& e) {
        if (notes) notes->push_back(provider_id + " failed on " + std::string(game_id) + ": " + e.what());
        return ScoreCard{};
    }
}

void sort_by_fused_score(std::vector<RankedCandidate>& items) {
    std::stable_sort(items.begin(), items.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
        if (a.popularity_rank != b.popularity_rank) return a.popularity_rank < b.popularity_rank;
        return a.game_id < b.game_id;
    });
}

Ranking rank(const CandidatePool& pool, const UserIntent& intent, const RankingConfig& cfg, const AgentContext& ctx) {
    validate(cfg);
    if (pool.candidates.empty()) throw PreconditionError("rank requires a non-empty candidate pool");
    Ranking out;
    const auto n = pool.candidates.size();

    std::vector<ChatRequest> requests;
    requests.reserve(2 * n);
    for (std::size_t p = 0; p < 2; ++p)
        for (const auto& c : pool.candidates)
            requests.push_back(make_request(cfg.provider_ids[p], "rank", score_prompt(intent, c.game_id, ctx)));
    const auto results = ctx.gateway.complete_parallel(requests);
    out.provider_calls = results.size();

    out.items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RankedCandidate rc;
        rc.game_id = pool.candidates[i].game_id;
        rc.popularity_rank = ctx.catalog().popularity_rank(rc.game_id);
        for (std::size_t p = 0; p < 2; ++p) {
            const auto& r = results[p * n + i];
            if (r.ok()) {
                rc.per_provider_cards[p] = parse_score_card(r.response->content, &out.notes);
            } else {
                out.notes.push_back(cfg.provider_ids[p] + " failed on " + rc.game_id + ": " + r.error_message);
                rc.per_provider_cards[p] = ScoreCard{};
            }
        }
        rc.fused_score = combine_scores(rc.per_provider_cards, cfg);
        out.items.push_back(std::move(rc));
    }
    sort_by_fused_score(out.items);
    out.items = apply_exploration(std::move(out.items), intent, cfg, ctx.catalog());
    return out;
}

std::vector<RankedCandidate> apply_exploration(std::vector<RankedCandidate> ranked, const UserIntent& intent,
                                               const RankingConfig& cfg, const Catalog& catalog) {
    SeededRng rng(cfg.exploration_seed);
    if (!rng.bernoulli(cfg.exploration_rate)) return ranked;
    const std::size_t k = std::min(cfg.reflection_depth, ranked.size());
    if (k == 0) return ranked;

    const auto& preferred = intent.preferred_genres;
    for (std::size_t j = k; j < ranked.size(); ++j) {
        const auto* r = catalog.get_record(ranked[j].game_id);
        if (!r || std::find(preferred.begin(), preferred.end(), r->genre) != preferred.end()) continue;
        // ranked is sorted, so the first qualifying item outside the window has
        // the highest fused score; slide it into slot k.
        auto explorer = std::move(ranked[j]);
        explorer.is_exploratory = true;
        ranked.erase(ranked.begin() + static_cast<std::ptrdiff_t>(j));
        ranked.insert(ranked.begin() + static_cast<std::ptrdiff_t>(k - 1), std::move(explorer));
        return ranked;
    }
    return ranked;
}

GameProfile build_game_profile(std::string_view id, const Toolbox& toolbox) {
    const auto* r = toolbox.catalog().get_record(id);
    if (!r) throw NotFound(std::string(id));
    return GameProfile{r->id,   toolbox.get_game_info_str(id), toolbox.get_game_rank(id), r->tags, r->mood_tags,
                       r->devices, r->age_groups};
}

std::string render_profile(const GameProfile& p) {
    std::vector<std::string> devices;
    for (auto d : p.devices) devices.emplace_back(to_string(d));
    return p.game_id + " | " + p.info_str + " | popularity rank " + std::to_string(p.rank) + " | tags: " +
           join_set(p.tags) + " | moods: " + join_set(p.mood_tags) + " | devices: " + text::join(devices, ", ") +
           " | ages: " + join_set(p.age_groups);
}

std::optional<std::vector<std::string>> parse_permutation(std::string_view response,
                                                          const std::vector<std::string>& window_ids) {
    std::vector<std::string> ids;
    for (const auto& line : text::lines(response)) {
        auto t = text::trim(line);
        if (!t.empty()) ids.push_back(std::move(t));
    }
    if (ids.size() != window_ids.size()) return std::nullopt;
    auto a = ids;
    auto b = window_ids;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return std::nullopt;
    return ids;
}

Reflection reflect(std::vector<RankedCandidate> ranked, const UserIntent& intent, const RankingConfig& cfg,
                   const std::string& provider_id, const AgentContext& ctx) {
    if (ranked.empty()) throw PreconditionError("reflect requires a non-empty ranking");
    Reflection out;
    out.window = std::min(cfg.reflection_depth, ranked.size());

    std::vector<std::string> window_ids;
    std::vector<std::string> profiles;
    for (std::size_t i = 0; i < out.window; ++i) {
        window_ids.push_back(ranked[i].game_id);
        profiles.push_back(render_profile(build_game_profile(ranked[i].game_id, ctx.toolbox)));
    }
    const auto user = text::join(window_ids, ",") + "\n" +
                      ctx.prompts.render("reflect.user", {{"query", intent.free_text},
                                                          {"intent", summarize(intent, ctx.catalog())},
                                                          {"profiles", text::join(profiles, "\n")}});
    std::optional<std::vector<std::string>> perm;
    try {
        perm = parse_permutation(ctx.gateway.complete(make_request(provider_id, "reflect", user)).content, window_ids);
        if (!perm) out.notes.push_back("reflection returned a malformed permutation; order kept");
    } catch (const ProviderFailure& e) {
        out.notes.push_back(std::string("reflection provider failed: ") + e.what());
    }

    if (perm) {
        std::vector<RankedCandidate> window(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(out.window));
        for (std::size_t i = 0; i < out.window; ++i) {
            auto it = std::find_if(window.begin(), window.end(),
                                   [&](const RankedCandidate& c) { return c.game_id == (*perm)[i]; });
            ranked[i] = *it;
            ranked[i].reflection_adjusted = true;
        }
        out.applied = true;
    }
    out.items = std::move(ranked);
    return out;
}

}  // namespace matcha
