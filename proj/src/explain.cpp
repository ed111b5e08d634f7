#include "matcha/explain.hpp"

#include <array>
#include <future>

#include "matcha/errors.hpp"
#include "matcha/text.hpp"

namespace matcha {

namespace {

constexpr std::array<std::pair<ExplanationDimension, std::string_view>, 4> kDims = {{
    {ExplanationDimension::Category, "category"},
    {ExplanationDimension::Similarity, "similarity"},
    {ExplanationDimension::Demographics, "demographics"},
    {ExplanationDimension::PopularityNovelty, "popularity_novelty"},
}};

std::map<std::string, std::string> draft_vars(ExplanationDimension d, const GameRecord& game, const UserIntent& intent,
                                              const AgentContext& ctx) {
    std::map<std::string, std::string> vars{{"info", ctx.toolbox.get_game_info_str(game.id)}};
    switch (d) {
        case ExplanationDimension::Category:
            vars["genres"] = text::join(intent.preferred_genres, ", ");
            break;
        case ExplanationDimension::Similarity: {
            std::vector<std::string> names;
            for (const auto& id : intent.liked_game_ids) names.push_back(ctx.toolbox.get_game_name(id));
            vars["liked"] = text::join(names, ", ");
            break;
        }
        case ExplanationDimension::Demographics:
            vars["age_group"] = intent.age_group.value_or("");
            vars["ages"] = text::join(std::vector<std::string>(game.age_groups.begin(), game.age_groups.end()), ", ");
            break;
        case ExplanationDimension::PopularityNovelty:
            vars["rank"] = std::to_string(ctx.catalog().popularity_rank(game.id));
            vars["upvotes"] = std::to_string(game.upvotes);
            break;
    }
    return vars;
}

}  // namespace

std::string_view to_string(ExplanationDimension d) {
    for (const auto& [dim, name] : kDims)
        if (dim == d) return name;
    return "?";
}

std::set<ExplanationDimension> applicable_dimensions(const UserIntent& intent, std::string_view game_id,
                                                     const Catalog& catalog) {
    const auto* game = catalog.get_record(game_id);
    if (!game) throw NotFound(std::string(game_id));
    std::set<ExplanationDimension> out;
    if (!intent.preferred_genres.empty()) out.insert(ExplanationDimension::Category);
    if (!intent.liked_game_ids.empty()) out.insert(ExplanationDimension::Similarity);
    if (intent.age_group) out.insert(ExplanationDimension::Demographics);
    if (game->upvotes > 0 || catalog.popularity_rank(game_id) <= kPopularityNoveltyRankCutoff)
        out.insert(ExplanationDimension::PopularityNovelty);
    return out;
}

Explanation explain_game(std::string_view game_id, const UserIntent& intent, const std::string& provider_id,
                         const AgentContext& ctx) {
    const auto* game = ctx.catalog().get_record(game_id);
    if (!game) throw NotFound(std::string(game_id));
    Explanation out;
    out.game_id = game->id;

    std::vector<std::string> draft_lines;
    std::vector<std::string> draft_texts;
    for (auto dim : applicable_dimensions(intent, game_id, ctx.catalog())) {
        const auto name = std::string(to_string(dim));
        ExplanationDraft draft{dim, {}, false};
        try {
            const auto body = ctx.prompts.render("explain." + name, draft_vars(dim, *game, intent, ctx));
            auto resp = ctx.gateway.complete(make_request(provider_id, "explain." + name, game->id + "\n" + body));
            draft.text = text::trim(resp.content);
            draft.applicable = !draft.text.empty();
        } catch (const ProviderFailure&) {
            draft.text.clear();
        }
        if (draft.applicable) {
            draft_lines.push_back("[" + name + "] " + draft.text);
            draft_texts.push_back(draft.text);
        }
        out.drafts.push_back(std::move(draft));
    }

    if (draft_texts.empty()) {
        out.summary = ctx.toolbox.get_game_info_str(game_id);
        return out;
    }
    try {
        const auto body = ctx.prompts.render("explain.aggregate", {{"query", intent.free_text},
                                                                   {"info", ctx.toolbox.get_game_info_str(game_id)},
                                                                   {"drafts", text::join(draft_lines, "\n")}});
        auto resp = ctx.gateway.complete(make_request(provider_id, "explain.aggregate", game->id + "\n" + body));
        out.summary = text::trim(resp.content);
    } catch (const ProviderFailure&) {
        out.summary.clear();
    }
    if (out.summary.empty()) out.summary = text::join(draft_texts, " ");
    return out;
}

std::map<std::string, Explanation> explain_top(const std::vector<std::string>& ranked_ids, const UserIntent& intent,
                                               std::size_t quota, const std::string& provider_id,
                                               const AgentContext& ctx) {
    if (quota == 0) throw PreconditionError("explanation quota must be positive");
    const auto n = std::min(quota, ranked_ids.size());
    std::vector<std::future<Explanation>> jobs;
    jobs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& id = ranked_ids[i];
        if (ctx.gateway.fan_out() == FanOut::Sequential)
            jobs.push_back(std::async(std::launch::deferred, [&, id] { return explain_game(id, intent, provider_id, ctx); }));
        else
            jobs.push_back(std::async(std::launch::async, [&, id] { return explain_game(id, intent, provider_id, ctx); }));
    }
    std::map<std::string, Explanation> out;
    for (auto& j : jobs) {
        auto e = j.get();
        out.emplace(e.game_id, std::move(e));
    }
    return out;
}

}  // namespace matcha
