#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "matcha/agent_context.hpp"
#include "matcha/candidate_gen.hpp"
#include "matcha/intent.hpp"

namespace matcha {

enum class ScoreDimension { Popularity, PreferenceMatch, HistorySimilarity, GenreAlignment, AgeSuitability };

inline constexpr std::size_t kNumDimensions = 5;
inline constexpr std::array<std::string_view, kNumDimensions> kDimensionNames = {
    "popularity", "preference_match", "history_similarity", "genre_alignment", "age_suitability"};

struct ScoreCard {
    static constexpr double kMin = 0.0;
    static constexpr double kMax = 10.0;
    static constexpr double kNeutral = 5.0;

    std::array<double, kNumDimensions> values{kNeutral, kNeutral, kNeutral, kNeutral, kNeutral};

    double operator[](ScoreDimension d) const { return values[static_cast<std::size_t>(d)]; }
    double& operator[](ScoreDimension d) { return values[static_cast<std::size_t>(d)]; }
    bool operator==(const ScoreCard&) const = default;
};

/// Parses `dimension=integer` pairs (any whitespace between them). Values are
/// clamped to [0,10]; a missing dimension stays neutral and adds a note.
ScoreCard parse_score_card(std::string_view response, std::vector<std::string>* notes = nullptr);

struct RankingConfig {
    std::array<std::string, 2> provider_ids;
    std::array<double, 2> provider_weights{0.5, 0.5};
    std::array<double, kNumDimensions> dimension_weights{1.0, 1.0, 1.0, 1.0, 1.0};
    double exploration_rate = 0.15;
    std::uint64_t exploration_seed = 0;
    std::size_t reflection_depth = 8;
};

void validate(const RankingConfig& cfg);  // throws ConfigError

struct RankedCandidate {
    std::string game_id;
    std::array<ScoreCard, 2> per_provider_cards;
    double fused_score = 0.0;
    bool is_exploratory = false;
    bool reflection_adjusted = false;
    std::size_t popularity_rank = 0;
};

struct GameProfile {
    std::string game_id;
    std::string info_str;
    std::size_t rank = 0;
    std::set<std::string> tags;
    std::set<std::string> mood_tags;
    std::set<Device> devices;
    std::set<std::string> age_groups;
};

// Σ_p ŵ_p · Σ_d v̂_d · card_p[d] with both weight vectors normalized to sum 1.
double combine_scores(const std::array<ScoreCard, 2>& cards, const RankingConfig& cfg);

std::string score_prompt(const UserIntent& intent, std::string_view game_id, const AgentContext& ctx);

// Provider failures degrade to an all-neutral card.
ScoreCard score_with_provider(const AgentContext& ctx, const std::string& provider_id, const UserIntent& intent,
                              std::string_view game_id, std::vector<std::string>* notes = nullptr);

struct Ranking {
    std::vector<RankedCandidate> items;
    std::vector<std::string> notes;
    std::size_t provider_calls = 0;
};

// Fused-score descending, then popularity rank, then id.
void sort_by_fused_score(std::vector<RankedCandidate>& items);

/// Both providers score every candidate in one parallel fan-out; the fused
/// order then goes through apply_exploration.
Ranking rank(const CandidatePool& pool, const UserIntent& intent, const RankingConfig& cfg, const AgentContext& ctx);

std::vector<RankedCandidate> apply_exploration(std::vector<RankedCandidate> ranked, const UserIntent& intent,
                                               const RankingConfig& cfg, const Catalog& catalog);

GameProfile build_game_profile(std::string_view id, const Toolbox& toolbox);
std::string render_profile(const GameProfile& profile);

struct Reflection {
    std::vector<RankedCandidate> items;
    std::size_t window = 0;
    bool applied = false;
    std::vector<std::string> notes;
};

// Reads one id per line; returns the permutation only if it is exactly a
// reordering of `window_ids`.
std::optional<std::vector<std::string>> parse_permutation(std::string_view response,
                                                          const std::vector<std::string>& window_ids);

/// Single reflection pass over the top min(reflection_depth, n) items.
Reflection reflect(std::vector<RankedCandidate> ranked, const UserIntent& intent, const RankingConfig& cfg,
                   const std::string& provider_id, const AgentContext& ctx);

}  // namespace matcha
