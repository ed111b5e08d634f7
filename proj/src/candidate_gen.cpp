#include "matcha/candidate_gen.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "matcha/errors.hpp"

namespace matcha {

std::vector<std::string> CandidatePool::ids() const {
    std::vector<std::string> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(c.game_id);
    return out;
}

namespace {

class PoolBuilder {
public:
    PoolBuilder(const UserIntent& intent, const Toolbox& toolbox, CandidatePool& pool)
        : intent_(intent), toolbox_(toolbox), pool_(pool) {}

    void run(const std::string& tool_name, const std::function<std::vector<std::string>()>& call) {
        ToolResult result{tool_name, {}, std::nullopt};
        try {
            result.game_ids = call();
        } catch (const Error& e) {
            pool_.notes.push_back(tool_name + " failed: " + e.what());
            result.note = e.what();
        }
        for (const auto& id : result.game_ids) add(id, tool_name);
        pool_.tool_results.push_back(std::move(result));
    }

    void add(const std::string& id, const std::string& source) {
        if (std::find(intent_.liked_game_ids.begin(), intent_.liked_game_ids.end(), id) != intent_.liked_game_ids.end())
            return;
        sources_[id].insert(source);
    }

    bool admissible(const std::string& id) const {
        const auto* r = toolbox_.catalog().get_record(id);
        if (!r) return false;
        if (intent_.device && !r->devices.count(*intent_.device)) return false;
        return std::find(intent_.disliked_genres.begin(), intent_.disliked_genres.end(), r->genre) ==
               intent_.disliked_genres.end();
    }

    std::size_t size() const { return sources_.size(); }
    bool contains(const std::string& id) const { return sources_.count(id) > 0; }

    void apply_hard_filters() {
        std::vector<std::string> ids;
        for (const auto& [id, _] : sources_) ids.push_back(id);
        // Disliked genres go through the tool so its contract stays exercised.
        auto kept = toolbox_.filter_by_dislike_genres(ids, intent_.disliked_genres);
        std::set<std::string> keep;
        for (const auto& id : kept) {
            if (intent_.device && !toolbox_.is_device_compatible(id, to_string(*intent_.device))) continue;
            keep.insert(id);
        }
        const auto before = sources_.size();
        std::erase_if(sources_, [&](const auto& kv) { return !keep.count(kv.first); });
        if (before != sources_.size())
            pool_.notes.push_back("hard filters removed " + std::to_string(before - sources_.size()) + " candidates");
    }

    std::vector<Candidate> finish() const {
        const auto& catalog = toolbox_.catalog();
        std::vector<Candidate> out;
        for (const auto& [id, srcs] : sources_) out.push_back({id, srcs, catalog.popularity_rank(id)});
        std::sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
            if (a.sources.size() != b.sources.size()) return a.sources.size() > b.sources.size();
            return a.base_popularity_rank < b.base_popularity_rank;
        });
        if (out.size() > CandidatePool::kMaxSize) out.resize(CandidatePool::kMaxSize);
        return out;
    }

private:
    const UserIntent& intent_;
    const Toolbox& toolbox_;
    CandidatePool& pool_;
    std::map<std::string, std::set<std::string>> sources_;
};

}  // namespace

CandidatePool generate(const UserIntent& intent, const Toolbox& toolbox, std::uint64_t seed) {
    CandidatePool pool;
    pool.intent = intent;
    PoolBuilder builder(intent, toolbox, pool);

    for (const auto& id : intent.liked_game_ids) {
        builder.run("get_similar_games_cf", [&] { return toolbox.get_similar_games_cf(id); });
        builder.run("get_similar_games_content", [&] { return toolbox.get_similar_games_content(id); });
    }
    for (const auto& genre : intent.preferred_genres)
        builder.run("get_search_results", [&] { return toolbox.get_search_results(genre); });
    if (intent.mood)
        builder.run("suggest_games_based_on_mood", [&] { return toolbox.suggest_games_based_on_mood(*intent.mood); });
    if (intent.age_group)
        builder.run("get_games_by_age_group", [&] { return toolbox.get_games_by_age_group(*intent.age_group); });
    if (builder.size() < CandidatePool::kMinGathered)
        builder.run("get_default_games", [&] { return toolbox.get_default_games(CandidatePool::kMinGathered, seed); });

    builder.apply_hard_filters();

    if (builder.size() < CandidatePool::kMinGathered) {
        // Walk the same seeded permutation of the top-100 further, then the
        // whole catalog, keeping only admissible games.
        std::vector<std::string> refill;
        auto consider = [&](const std::string& id) {
            if (builder.size() + refill.size() >= CandidatePool::kMinGathered) return;
            if (builder.admissible(id) && !builder.contains(id) && std::find(refill.begin(), refill.end(), id) == refill.end() &&
                std::find(intent.liked_game_ids.begin(), intent.liked_game_ids.end(), id) == intent.liked_game_ids.end())
                refill.push_back(id);
        };
        for (const auto& id : toolbox.get_default_games(Toolbox::kDefaultPool, seed)) consider(id);
        for (const auto& id : toolbox.catalog().popularity_order()) consider(id);
        builder.run("get_default_games", [&] { return refill; });
        pool.notes.push_back("refilled " + std::to_string(refill.size()) + " candidates from defaults");
    }

    pool.candidates = builder.finish();
    return pool;
}

}  // namespace matcha
