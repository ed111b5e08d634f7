#include "matcha/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "matcha/errors.hpp"
#include "matcha/text.hpp"

namespace matcha {

namespace {

constexpr std::array<std::pair<Device, std::string_view>, 5> kDeviceLabels = {{
    {Device::PC, "PC"},
    {Device::Mobile, "MOBILE"},
    {Device::Console, "CONSOLE"},
    {Device::Tablet, "TABLET"},
    {Device::VR, "VR"},
}};

std::set<std::string> string_set(const nlohmann::json& obj, const char* key, std::size_t line_no, bool lower) {
    std::set<std::string> out;
    if (!obj.contains(key)) return out;
    const auto& arr = obj.at(key);
    if (!arr.is_array()) throw ParseError(line_no, std::string("'") + key + "' must be a string array");
    for (const auto& v : arr) {
        if (!v.is_string()) throw ParseError(line_no, std::string("'") + key + "' must be a string array");
        out.insert(lower ? text::to_lower(v.get<std::string>()) : v.get<std::string>());
    }
    return out;
}

std::string required_string(const nlohmann::json& obj, const char* key, std::size_t line_no) {
    if (!obj.contains(key) || !obj.at(key).is_string())
        throw ParseError(line_no, std::string("missing string field '") + key + "'");
    return obj.at(key).get<std::string>();
}

}  // namespace

std::string_view to_string(Device d) {
    for (const auto& [dev, label] : kDeviceLabels)
        if (dev == d) return label;
    return "?";
}

std::optional<Device> parse_device(std::string_view label) {
    const auto upper = text::to_upper(text::trim(label));
    for (const auto& [dev, name] : kDeviceLabels)
        if (name == upper) return dev;
    return std::nullopt;
}

bool is_age_group(std::string_view label) {
    return std::find(kAgeGroups.begin(), kAgeGroups.end(), label) != kAgeGroups.end();
}

GenreVocabulary::GenreVocabulary(std::vector<std::string> genres) : genres_(std::move(genres)) {
    if (genres_.size() != kSize)
        throw ValidationError("genre vocabulary must have exactly 21 entries, got " + std::to_string(genres_.size()));
    std::set<std::string> seen;
    for (const auto& g : genres_) {
        if (g.empty()) throw ValidationError("empty genre label");
        if (!seen.insert(g).second) throw ValidationError("duplicate genre label: " + g);
    }
}

bool GenreVocabulary::contains(std::string_view genre) const {
    return std::find(genres_.begin(), genres_.end(), genre) != genres_.end();
}

Catalog::Catalog(std::vector<GameRecord> games, std::vector<PlayEvent> plays, GenreVocabulary vocabulary)
    : games_(std::move(games)), plays_(std::move(plays)), vocabulary_(std::move(vocabulary)) {
    for (std::size_t i = 0; i < games_.size(); ++i) {
        const auto& g = games_[i];
        if (g.id.empty()) throw ValidationError("game record with empty id");
        if (g.name.empty()) throw ValidationError("game " + g.id + " has an empty name");
        if (g.upvotes < 0) throw ValidationError("game " + g.id + " has negative upvotes");
        if (!vocabulary_.contains(g.genre)) throw UnknownGenre(g.id, g.genre);
        if (!index_.emplace(g.id, i).second) throw DuplicateId(g.id);
    }
    for (const auto& p : plays_) {
        if (!index_.count(p.game_id)) throw ValidationError("play event references unknown game " + p.game_id);
        if (p.day_index < 0) throw ValidationError("negative day_index for user " + p.user_id);
    }

    by_popularity_.reserve(games_.size());
    for (const auto& g : games_) by_popularity_.push_back(g.id);
    std::sort(by_popularity_.begin(), by_popularity_.end(), [this](const std::string& a, const std::string& b) {
        const auto ua = games_[index_.at(a)].upvotes;
        const auto ub = games_[index_.at(b)].upvotes;
        if (ua != ub) return ua > ub;
        return a < b;
    });
    for (std::size_t i = 0; i < by_popularity_.size(); ++i) rank_.emplace(by_popularity_[i], i + 1);

    for (const auto& g : games_) {
        auto add = [&](std::string_view s) {
            for (auto& tok : text::word_tokens(s)) keywords_[tok].insert(g.id);
        };
        add(g.name);
        add(g.description);
        for (const auto& t : g.tags) add(t);
    }
}

Catalog Catalog::load(const std::filesystem::path& games_path,
                      const std::optional<std::filesystem::path>& plays_path,
                      const std::filesystem::path& vocab_path) {
    auto vocab = parse_vocabulary(read_file(vocab_path));
    auto games = parse_games(read_file(games_path));
    std::vector<PlayEvent> plays;
    if (plays_path) plays = parse_plays(read_file(*plays_path));
    return Catalog(std::move(games), std::move(plays), std::move(vocab));
}

const GameRecord* Catalog::get_record(std::string_view id) const {
    if (id.empty()) return nullptr;
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &games_[it->second];
}

std::size_t Catalog::popularity_rank(std::string_view id) const {
    auto it = rank_.find(std::string(id));
    if (it == rank_.end()) throw NotFound(std::string(id));
    return it->second;
}

std::vector<std::string> Catalog::top_n_popular(std::size_t n) const {
    n = std::min(n, by_popularity_.size());
    return {by_popularity_.begin(), by_popularity_.begin() + static_cast<std::ptrdiff_t>(n)};
}

const std::set<std::string>& Catalog::keyword_postings(const std::string& token) const {
    static const std::set<std::string> kEmpty;
    auto it = keywords_.find(token);
    return it == keywords_.end() ? kEmpty : it->second;
}

GameRecord parse_game_line(std::string_view line, std::size_t line_no) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_no, e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "record is not an object");

    GameRecord g;
    g.id = required_string(obj, "id", line_no);
    if (g.id.empty()) throw ParseError(line_no, "empty id");
    g.name = required_string(obj, "name", line_no);
    if (g.name.empty()) throw ParseError(line_no, "empty name");
    g.genre = required_string(obj, "genre", line_no);
    g.description = obj.contains("description") ? required_string(obj, "description", line_no) : "";
    if (obj.contains("upvotes")) {
        const auto& up = obj.at("upvotes");
        if (!up.is_number_integer()) throw ParseError(line_no, "'upvotes' must be an integer");
        g.upvotes = up.get<std::int64_t>();
        if (g.upvotes < 0) throw ParseError(line_no, "'upvotes' must be non-negative");
    }
    for (const auto& label : string_set(obj, "devices", line_no, false)) {
        auto d = parse_device(label);
        if (!d) throw ParseError(line_no, "unknown device label '" + label + "'");
        g.devices.insert(*d);
    }
    g.age_groups = string_set(obj, "age_groups", line_no, false);
    for (const auto& a : g.age_groups)
        if (!is_age_group(a)) throw ParseError(line_no, "unknown age group '" + a + "'");
    g.mood_tags = string_set(obj, "mood_tags", line_no, true);
    g.tags = string_set(obj, "tags", line_no, true);
    return g;
}

std::vector<GameRecord> parse_games(std::string_view content) {
    std::vector<GameRecord> out;
    std::set<std::string> seen;
    auto ls = text::lines(content);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (text::trim(ls[i]).empty()) continue;
        auto g = parse_game_line(ls[i], i + 1);
        if (!seen.insert(g.id).second) throw DuplicateId(g.id);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<PlayEvent> parse_plays(std::string_view content) {
    std::vector<PlayEvent> out;
    auto ls = text::lines(content);
    bool header_seen = false;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const auto line = text::trim(ls[i]);
        if (line.empty()) continue;
        if (!header_seen) {
            if (text::to_lower(line) != "user_id,game_id,day_index")
                throw ParseError(i + 1, "expected header 'user_id,game_id,day_index'");
            header_seen = true;
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(text::trim(c));
        if (cols.size() != 3) throw ParseError(i + 1, "expected 3 comma-separated columns");
        if (cols[0].empty() || cols[1].empty()) throw ParseError(i + 1, "empty user_id or game_id");
        PlayEvent ev{cols[0], cols[1], 0};
        try {
            std::size_t used = 0;
            ev.day_index = std::stoll(cols[2], &used);
            if (used != cols[2].size() || ev.day_index < 0) throw std::invalid_argument("bad");
        } catch (const std::exception&) {
            throw ParseError(i + 1, "day_index must be a non-negative integer");
        }
        out.push_back(std::move(ev));
    }
    if (!header_seen) throw ParseError(1, "missing header row");
    return out;
}

GenreVocabulary parse_vocabulary(std::string_view content) {
    std::vector<std::string> genres;
    auto ls = text::lines(content);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto g = text::trim(ls[i]);
        if (g.empty()) continue;
        genres.push_back(std::move(g));
    }
    return GenreVocabulary(std::move(genres));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace matcha
