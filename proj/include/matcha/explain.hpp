#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "matcha/agent_context.hpp"
#include "matcha/intent.hpp"

namespace matcha {

enum class ExplanationDimension { Category, Similarity, Demographics, PopularityNovelty };

std::string_view to_string(ExplanationDimension d);

struct ExplanationDraft {
    ExplanationDimension dimension = ExplanationDimension::Category;
    std::string text;  // empty iff !applicable
    bool applicable = false;
};

struct Explanation {
    std::string game_id;
    std::string summary;
    std::vector<ExplanationDraft> drafts;
};

inline constexpr std::size_t kDefaultExplanationQuota = 5;
inline constexpr std::size_t kPopularityNoveltyRankCutoff = 100;

std::set<ExplanationDimension> applicable_dimensions(const UserIntent& intent, std::string_view game_id,
                                                     const Catalog& catalog);

/// One provider call per applicable dimension, then one aggregation call.
/// A failed dimension call marks that draft inapplicable; a failed
/// aggregation joins the draft texts with spaces.
Explanation explain_game(std::string_view game_id, const UserIntent& intent, const std::string& provider_id,
                         const AgentContext& ctx);

// Explanations for the first min(quota, ranked_ids.size()) ids. quota == 0 throws PreconditionError.
std::map<std::string, Explanation> explain_top(const std::vector<std::string>& ranked_ids, const UserIntent& intent,
                                               std::size_t quota, const std::string& provider_id,
                                               const AgentContext& ctx);

}  // namespace matcha
