#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "matcha/catalog.hpp"

namespace matcha {

struct ToolResult {
    std::string tool_name;
    std::vector<std::string> game_ids;
    std::optional<std::string> note;
};

using SparseVector = std::map<std::string, double>;

double cosine_similarity(const SparseVector& a, const SparseVector& b);

// Pluggable text-vector provider behind content similarity.
class TextVectorizer {
public:
    virtual ~TextVectorizer() = default;
    virtual SparseVector vectorize(std::string_view text) const = 0;
};

// Term counts over lowercased word tokens.
class TermFrequencyVectorizer : public TextVectorizer {
public:
    SparseVector vectorize(std::string_view text) const override;
};

struct GenreAlias {
    std::string alias;  // lowercased
    std::string genre;
};

// Lines of the form `alias -> CanonicalGenre`; blank lines and '#' comments skipped.
std::vector<GenreAlias> parse_aliases(std::string_view content);

struct FuzzyMatch {
    std::string game_id;
    double score = 0.0;
};

struct GenreForecast {
    std::vector<std::string> genres;
    std::string note;
};

/// The candidate-generation tools, all read-only over one catalog.
class Toolbox {
public:
    static constexpr double kFuzzyNameThreshold = 0.55;
    static constexpr double kFuzzyGenreThreshold = 0.4;
    static constexpr std::size_t kSearchCap = 10;
    static constexpr std::size_t kSimilarCap = 10;
    static constexpr std::size_t kAgeGroupCap = 20;
    static constexpr std::size_t kMoodCap = 10;
    static constexpr std::size_t kDefaultPool = 100;
    static constexpr std::size_t kMaxSearchWords = 3;
    static constexpr std::int64_t kTrendWindowDays = 7;
    static constexpr std::size_t kTrendTop = 3;

    explicit Toolbox(const Catalog& catalog, std::vector<GenreAlias> aliases = {},
                     std::shared_ptr<const TextVectorizer> vectorizer = nullptr);

    const Catalog& catalog() const { return catalog_; }

    std::string get_game_name(std::string_view id) const;
    std::string get_game_genre(std::string_view id) const;
    std::string get_game_description(std::string_view id) const;
    std::size_t get_game_rank(std::string_view id) const;

    // Throws InvalidDevice for labels outside {PC, MOBILE, CONSOLE, TABLET, VR}.
    bool is_device_compatible(std::string_view id, std::string_view device) const;

    // Best match at or above kFuzzyNameThreshold, else nullopt (NoMatch).
    std::optional<FuzzyMatch> get_game_id_from_fuzzy_name(std::string_view fuzzy) const;
    // max(acronym match, trigram overlap) for one name.
    static double fuzzy_name_score(std::string_view fuzzy, std::string_view name);
    static std::string name_initials(std::string_view name);

    std::vector<std::string> fuzzy_genre_to_genres(std::string_view fuzzy) const;

    // Throws QueryTooLong above three words.
    std::vector<std::string> get_search_results(std::string_view query) const;

    std::vector<std::string> get_similar_games_cf(std::string_view id) const;
    std::vector<std::string> get_similar_games_content(std::string_view id) const;
    double content_similarity(std::string_view a, std::string_view b) const;

    std::vector<std::string> get_games_by_age_group(std::string_view age_group) const;
    std::vector<std::string> get_default_games(std::size_t n, std::uint64_t seed) const;

    std::string get_game_info_str(std::string_view id) const;
    std::string game_ids_to_enum_game_info(const std::vector<std::string>& ids) const;

    std::vector<std::string> suggest_games_based_on_mood(std::string_view mood) const;
    std::vector<std::string> filter_by_dislike_genres(const std::vector<std::string>& ids,
                                                      const std::vector<std::string>& disliked_genres) const;

    // Approximation: genres ranked by play-count growth between the last two
    // 7-day windows. A non-empty `ids` restricts the forecast to their genres.
    GenreForecast predict_next_popular_genre(const std::vector<std::string>& ids) const;

private:
    const GameRecord& record(std::string_view id) const;

    const Catalog& catalog_;
    std::vector<GenreAlias> aliases_;
    std::shared_ptr<const TextVectorizer> vectorizer_;
    std::unordered_map<std::string, SparseVector> vectors_;
    std::unordered_map<std::string, std::vector<std::string>> players_of_;  // game -> distinct users
    std::unordered_map<std::string, std::vector<std::string>> games_of_;    // user -> distinct games
};

}  // namespace matcha
