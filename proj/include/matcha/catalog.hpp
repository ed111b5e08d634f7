#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace matcha {

enum class Device { PC, Mobile, Console, Tablet, VR };

std::string_view to_string(Device d);
std::optional<Device> parse_device(std::string_view label);  // case-insensitive

inline constexpr std::array<std::string_view, 5> kAgeGroups = {"<13", "13-17", "18-24", "25-34", "35+"};
bool is_age_group(std::string_view label);

struct GameRecord {
    std::string id;
    std::string name;
    std::string genre;
    std::string description;
    std::int64_t upvotes = 0;
    std::set<Device> devices;
    std::set<std::string> age_groups;
    std::set<std::string> mood_tags;
    std::set<std::string> tags;
};

struct PlayEvent {
    std::string user_id;
    std::string game_id;
    std::int64_t day_index = 0;
};

class GenreVocabulary {
public:
    static constexpr std::size_t kSize = 21;

    // Throws ValidationError unless exactly 21 unique non-empty labels.
    explicit GenreVocabulary(std::vector<std::string> genres);

    const std::vector<std::string>& genres() const { return genres_; }
    bool contains(std::string_view genre) const;

private:
    std::vector<std::string> genres_;
};

/// Immutable, fully indexed game catalog. Every tool reads from one of these.
///
/// Popularity order is upvotes descending with ties broken by id ascending,
/// so popularity_rank is a bijection onto 1..size().
class Catalog {
public:
    Catalog(std::vector<GameRecord> games, std::vector<PlayEvent> plays, GenreVocabulary vocabulary);

    static Catalog load(const std::filesystem::path& games_path,
                        const std::optional<std::filesystem::path>& plays_path,
                        const std::filesystem::path& vocab_path);

    std::size_t size() const { return games_.size(); }
    bool empty() const { return games_.empty(); }

    const GameRecord* get_record(std::string_view id) const;
    bool contains(std::string_view id) const { return get_record(id) != nullptr; }

    // Throws NotFound for unknown ids.
    std::size_t popularity_rank(std::string_view id) const;
    std::vector<std::string> top_n_popular(std::size_t n) const;

    // Ids in popularity order.
    const std::vector<std::string>& popularity_order() const { return by_popularity_; }

    const std::vector<GameRecord>& games() const { return games_; }
    const std::vector<PlayEvent>& play_events() const { return plays_; }
    const GenreVocabulary& vocabulary() const { return vocabulary_; }

    // Ids whose name, tags or description contain `token` (lowercased word token).
    const std::set<std::string>& keyword_postings(const std::string& token) const;

private:
    std::vector<GameRecord> games_;
    std::vector<PlayEvent> plays_;
    GenreVocabulary vocabulary_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> by_popularity_;
    std::unordered_map<std::string, std::size_t> rank_;
    std::map<std::string, std::set<std::string>> keywords_;
};

GameRecord parse_game_line(std::string_view line, std::size_t line_no);
std::vector<GameRecord> parse_games(std::string_view content);
std::vector<PlayEvent> parse_plays(std::string_view content);
GenreVocabulary parse_vocabulary(std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace matcha
