#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matcha/catalog.hpp"
#include "matcha/llm_gateway.hpp"
#include "matcha/prompts.hpp"
#include "matcha/toolbox.hpp"

namespace matcha {

enum class SocialMode { Solo, Multiplayer };

std::string_view to_string(SocialMode m);

struct UserIntent {
    std::vector<std::string> liked_game_ids;
    std::vector<std::string> liked_fuzzy_names;
    std::vector<std::string> preferred_genres;
    std::vector<std::string> disliked_genres;
    std::optional<Device> device;
    std::optional<std::string> age_group;
    std::optional<std::string> mood;
    std::optional<SocialMode> social_mode;
    std::string free_text;

    bool has_constraints() const;
};

// One-line human-readable summary embedded in downstream prompts.
std::string summarize(const UserIntent& intent, const Catalog& catalog);

// Checks the type invariants (disjoint genre lists, canonical labels, resolvable ids).
bool satisfies_invariants(const UserIntent& intent, const Catalog& catalog);

/// Turns an extraction block (`FIELD: value` lines) into a UserIntent,
/// resolving titles and genres through the toolbox. Never throws.
UserIntent intent_from_extraction(std::string_view block, std::string_view query, const Toolbox& toolbox);

// Provider failures propagate; malformed output degrades to an empty intent.
UserIntent parse_intent(std::string_view query, const Gateway& gateway, const std::string& provider_id,
                        const Toolbox& toolbox, const PromptSet& prompts);

}  // namespace matcha
