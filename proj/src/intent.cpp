#include "matcha/intent.hpp"

#include <algorithm>
#include <map>

#include "matcha/text.hpp"

namespace matcha {

namespace {

bool is_none(const std::string& v) {
    const auto l = text::to_lower(v);
    return l.empty() || l == "none" || l == "n/a" || l == "unknown" || l == "-";
}

void push_unique(std::vector<std::string>& xs, const std::string& v) {
    if (std::find(xs.begin(), xs.end(), v) == xs.end()) xs.push_back(v);
}

}  // namespace

std::string_view to_string(SocialMode m) { return m == SocialMode::Solo ? "solo" : "multiplayer"; }

bool UserIntent::has_constraints() const {
    return !liked_game_ids.empty() || !preferred_genres.empty() || !disliked_genres.empty() || device ||
           age_group || mood || social_mode;
}

std::string summarize(const UserIntent& intent, const Catalog& catalog) {
    std::vector<std::string> parts;
    if (!intent.liked_game_ids.empty()) {
        std::vector<std::string> names;
        for (const auto& id : intent.liked_game_ids)
            if (const auto* r = catalog.get_record(id)) names.push_back(r->name);
        parts.push_back("likes " + text::join(names, ", "));
    }
    if (!intent.preferred_genres.empty()) parts.push_back("prefers " + text::join(intent.preferred_genres, ", "));
    if (!intent.disliked_genres.empty()) parts.push_back("dislikes " + text::join(intent.disliked_genres, ", "));
    if (intent.device) parts.push_back("plays on " + std::string(to_string(*intent.device)));
    if (intent.age_group) parts.push_back("age " + *intent.age_group);
    if (intent.mood) parts.push_back("mood " + *intent.mood);
    if (intent.social_mode) parts.push_back(std::string(to_string(*intent.social_mode)) + " play");
    return parts.empty() ? "no stated preferences" : text::join(parts, "; ");
}

bool satisfies_invariants(const UserIntent& intent, const Catalog& catalog) {
    for (const auto& g : intent.preferred_genres) {
        if (!catalog.vocabulary().contains(g)) return false;
        if (std::find(intent.disliked_genres.begin(), intent.disliked_genres.end(), g) != intent.disliked_genres.end())
            return false;
    }
    for (const auto& g : intent.disliked_genres)
        if (!catalog.vocabulary().contains(g)) return false;
    for (const auto& id : intent.liked_game_ids)
        if (!catalog.contains(id)) return false;
    if (intent.age_group && !is_age_group(*intent.age_group)) return false;
    return true;
}

UserIntent intent_from_extraction(std::string_view block, std::string_view query, const Toolbox& toolbox) {
    UserIntent intent;
    intent.free_text = std::string(query);

    std::map<std::string, std::string> fields;
    for (const auto& line : text::lines(block)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        auto key = text::to_upper(text::trim(std::string_view(line).substr(0, colon)));
        auto value = text::trim(std::string_view(line).substr(colon + 1));
        if (!key.empty()) fields[key] = value;
    }
    auto field = [&](const char* name) -> std::string {
        auto it = fields.find(name);
        return it == fields.end() || is_none(it->second) ? std::string() : it->second;
    };

    for (const auto& title : text::split_list(field("LIKED_GAMES"), ',')) {
        if (is_none(title)) continue;
        if (auto m = toolbox.get_game_id_from_fuzzy_name(title))
            push_unique(intent.liked_game_ids, m->game_id);
        else
            push_unique(intent.liked_fuzzy_names, title);
    }
    for (const auto& g : text::split_list(field("GENRES"), ','))
        for (const auto& canon : toolbox.fuzzy_genre_to_genres(g)) push_unique(intent.preferred_genres, canon);
    for (const auto& g : text::split_list(field("DISLIKED_GENRES"), ','))
        for (const auto& canon : toolbox.fuzzy_genre_to_genres(g)) push_unique(intent.disliked_genres, canon);

    // A genre named both ways counts as disliked.
    std::erase_if(intent.preferred_genres, [&](const std::string& g) {
        return std::find(intent.disliked_genres.begin(), intent.disliked_genres.end(), g) !=
               intent.disliked_genres.end();
    });

    if (auto d = field("DEVICE"); !d.empty()) intent.device = parse_device(d);
    if (auto a = text::trim(field("AGE_GROUP")); is_age_group(a)) intent.age_group = a;
    if (auto m = text::to_lower(field("MOOD")); !m.empty()) intent.mood = m;
    const auto social = text::to_lower(field("SOCIAL"));
    if (social == "solo" || social == "single-player" || social == "singleplayer")
        intent.social_mode = SocialMode::Solo;
    else if (social == "multiplayer" || social == "multi-player" || social == "coop" || social == "co-op")
        intent.social_mode = SocialMode::Multiplayer;
    return intent;
}

UserIntent parse_intent(std::string_view query, const Gateway& gateway, const std::string& provider_id,
                        const Toolbox& toolbox, const PromptSet& prompts) {
    auto resp = gateway.complete(make_request(provider_id, "intent", std::string(query), prompts.raw("intent.system")));
    return intent_from_extraction(resp.content, query, toolbox);
}

}  // namespace matcha
