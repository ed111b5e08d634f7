#include "matcha/toolbox.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "matcha/errors.hpp"
#include "matcha/rng.hpp"
#include "matcha/text.hpp"

namespace matcha {

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [k, v] : a) {
        na += v * v;
        if (auto it = b.find(k); it != b.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : b) nb += v * v;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

SparseVector TermFrequencyVectorizer::vectorize(std::string_view s) const {
    SparseVector v;
    for (const auto& tok : text::word_tokens(s)) v[tok] += 1.0;
    return v;
}

std::vector<GenreAlias> parse_aliases(std::string_view content) {
    std::vector<GenreAlias> out;
    auto ls = text::lines(content);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto line = text::trim(ls[i]);
        if (line.empty() || line[0] == '#') continue;
        const auto arrow = line.find("->");
        if (arrow == std::string::npos) throw ParseError(i + 1, "expected 'alias -> Genre'");
        auto alias = text::to_lower(text::trim(line.substr(0, arrow)));
        auto genre = text::trim(line.substr(arrow + 2));
        if (alias.empty() || genre.empty()) throw ParseError(i + 1, "empty alias or genre");
        out.push_back({std::move(alias), std::move(genre)});
    }
    return out;
}

Toolbox::Toolbox(const Catalog& catalog, std::vector<GenreAlias> aliases,
                 std::shared_ptr<const TextVectorizer> vectorizer)
    : catalog_(catalog), aliases_(std::move(aliases)), vectorizer_(std::move(vectorizer)) {
    for (const auto& a : aliases_)
        if (!catalog_.vocabulary().contains(a.genre)) throw UnknownGenre("alias:" + a.alias, a.genre);
    if (!vectorizer_) vectorizer_ = std::make_shared<TermFrequencyVectorizer>();
    for (const auto& g : catalog_.games()) vectors_.emplace(g.id, vectorizer_->vectorize(g.description));

    std::map<std::string, std::set<std::string>> players;
    std::map<std::string, std::set<std::string>> games;
    for (const auto& ev : catalog_.play_events()) {
        players[ev.game_id].insert(ev.user_id);
        games[ev.user_id].insert(ev.game_id);
    }
    for (auto& [g, users] : players) players_of_.emplace(g, std::vector<std::string>(users.begin(), users.end()));
    for (auto& [u, gs] : games) games_of_.emplace(u, std::vector<std::string>(gs.begin(), gs.end()));
}

const GameRecord& Toolbox::record(std::string_view id) const {
    const auto* r = catalog_.get_record(id);
    if (!r) throw NotFound(std::string(id));
    return *r;
}

std::string Toolbox::get_game_name(std::string_view id) const { return record(id).name; }
std::string Toolbox::get_game_genre(std::string_view id) const { return record(id).genre; }
std::string Toolbox::get_game_description(std::string_view id) const { return record(id).description; }
std::size_t Toolbox::get_game_rank(std::string_view id) const { return catalog_.popularity_rank(id); }

bool Toolbox::is_device_compatible(std::string_view id, std::string_view device) const {
    const auto d = parse_device(device);
    if (!d) throw InvalidDevice(std::string(device));
    return record(id).devices.count(*d) > 0;
}

std::string Toolbox::name_initials(std::string_view name) {
    std::string out;
    for (const auto& word : text::split_whitespace(name)) {
        std::string alnum;
        for (unsigned char c : word)
            if (std::isalnum(c)) alnum.push_back(static_cast<char>(c));
        if (alnum.empty()) continue;
        if (std::all_of(alnum.begin(), alnum.end(), [](unsigned char c) { return std::isdigit(c); }))
            out += alnum;
        else if (std::isupper(static_cast<unsigned char>(alnum.front())))
            out.push_back(alnum.front());
    }
    return out;
}

double Toolbox::fuzzy_name_score(std::string_view fuzzy, std::string_view name) {
    double score = text::trigram_similarity(fuzzy, name);
    std::string compact;
    for (unsigned char c : fuzzy)
        if (!std::isspace(c)) compact.push_back(static_cast<char>(std::toupper(c)));
    const auto initials = text::to_upper(name_initials(name));
    if (initials.size() >= 2 && compact == initials) score = 1.0;
    return score;
}

std::optional<FuzzyMatch> Toolbox::get_game_id_from_fuzzy_name(std::string_view fuzzy) const {
    if (text::trim(fuzzy).empty()) return std::nullopt;
    std::optional<FuzzyMatch> best;
    // Popularity order makes the more popular game win ties.
    for (const auto& id : catalog_.popularity_order()) {
        const double s = fuzzy_name_score(fuzzy, catalog_.get_record(id)->name);
        if (!best || s > best->score) best = FuzzyMatch{id, s};
    }
    if (!best || best->score < kFuzzyNameThreshold) return std::nullopt;
    return best;
}

std::vector<std::string> Toolbox::fuzzy_genre_to_genres(std::string_view fuzzy) const {
    const auto key = text::to_lower(text::trim(fuzzy));
    if (key.empty()) return {};
    std::vector<std::string> out;
    for (const auto& a : aliases_)
        if (a.alias == key && std::find(out.begin(), out.end(), a.genre) == out.end()) out.push_back(a.genre);
    if (!out.empty()) return out;

    std::vector<std::pair<double, std::size_t>> scored;
    const auto& genres = catalog_.vocabulary().genres();
    for (std::size_t i = 0; i < genres.size(); ++i) {
        if (text::to_lower(genres[i]) == key) return {genres[i]};
        const double s = text::trigram_similarity(key, genres[i]);
        if (s >= kFuzzyGenreThreshold) scored.emplace_back(s, i);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [s, i] : scored) out.push_back(genres[i]);
    return out;
}

std::vector<std::string> Toolbox::get_search_results(std::string_view query) const {
    const auto words = text::split_whitespace(query);
    if (words.size() > kMaxSearchWords) throw QueryTooLong(words.size());
    std::set<std::string> tokens;
    for (const auto& t : text::word_tokens(query)) tokens.insert(t);

    std::map<std::string, std::size_t> hits;
    for (const auto& tok : tokens)
        for (const auto& id : catalog_.keyword_postings(tok)) ++hits[id];

    std::vector<std::pair<std::string, std::size_t>> ranked(hits.begin(), hits.end());
    std::sort(ranked.begin(), ranked.end(), [this](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return catalog_.popularity_rank(a.first) < catalog_.popularity_rank(b.first);
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && i < kSearchCap; ++i) out.push_back(ranked[i].first);
    return out;
}

std::vector<std::string> Toolbox::get_similar_games_cf(std::string_view id) const {
    record(id);
    auto it = players_of_.find(std::string(id));
    if (it == players_of_.end()) return {};
    std::map<std::string, std::size_t> co;
    for (const auto& user : it->second)
        for (const auto& other : games_of_.at(user))
            if (other != id) ++co[other];

    std::vector<std::pair<std::string, std::size_t>> ranked(co.begin(), co.end());
    std::sort(ranked.begin(), ranked.end(), [this](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return catalog_.popularity_rank(a.first) < catalog_.popularity_rank(b.first);
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && i < kSimilarCap; ++i) out.push_back(ranked[i].first);
    return out;
}

double Toolbox::content_similarity(std::string_view a, std::string_view b) const {
    record(a);
    record(b);
    return cosine_similarity(vectors_.at(std::string(a)), vectors_.at(std::string(b)));
}

std::vector<std::string> Toolbox::get_similar_games_content(std::string_view id) const {
    const auto& self = vectors_.at(record(id).id);
    std::vector<std::pair<std::string, double>> scored;
    for (const auto& g : catalog_.games()) {
        if (g.id == id) continue;
        const double s = cosine_similarity(self, vectors_.at(g.id));
        if (s > 0.0) scored.emplace_back(g.id, s);
    }
    std::sort(scored.begin(), scored.end(), [this](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return catalog_.popularity_rank(a.first) < catalog_.popularity_rank(b.first);
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < kSimilarCap; ++i) out.push_back(scored[i].first);
    return out;
}

std::vector<std::string> Toolbox::get_games_by_age_group(std::string_view age_group) const {
    if (!is_age_group(age_group)) throw InvalidAgeGroup(std::string(age_group));
    std::vector<std::string> out;
    for (const auto& id : catalog_.popularity_order()) {
        if (out.size() >= kAgeGroupCap) break;
        if (catalog_.get_record(id)->age_groups.count(std::string(age_group))) out.push_back(id);
    }
    return out;
}

std::vector<std::string> Toolbox::get_default_games(std::size_t n, std::uint64_t seed) const {
    SeededRng rng(seed);
    return rng.sample(catalog_.top_n_popular(kDefaultPool), n);
}

std::string Toolbox::get_game_info_str(std::string_view id) const {
    const auto& r = record(id);
    return r.name + ", " + r.genre + ", " + r.description;
}

std::string Toolbox::game_ids_to_enum_game_info(const std::vector<std::string>& ids) const {
    std::vector<std::string> rows;
    rows.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto info = catalog_.contains(ids[i]) ? get_game_info_str(ids[i]) : std::string("[unknown]");
        rows.push_back(std::to_string(i + 1) + ". " + info);
    }
    return text::join(rows, "\n");
}

std::vector<std::string> Toolbox::suggest_games_based_on_mood(std::string_view mood) const {
    const auto key = text::to_lower(text::trim(mood));
    std::vector<std::string> out;
    if (key.empty()) return out;
    for (const auto& id : catalog_.popularity_order()) {
        if (out.size() >= kMoodCap) break;
        if (catalog_.get_record(id)->mood_tags.count(key)) out.push_back(id);
    }
    return out;
}

std::vector<std::string> Toolbox::filter_by_dislike_genres(const std::vector<std::string>& ids,
                                                           const std::vector<std::string>& disliked_genres) const {
    std::vector<std::string> out;
    for (const auto& id : ids) {
        const auto* r = catalog_.get_record(id);
        if (!r) continue;
        if (std::find(disliked_genres.begin(), disliked_genres.end(), r->genre) == disliked_genres.end())
            out.push_back(id);
    }
    return out;
}

GenreForecast Toolbox::predict_next_popular_genre(const std::vector<std::string>& ids) const {
    GenreForecast out;
    out.note = "approximation: genres ranked by play-count growth between the last two 7-day windows";
    const auto& plays = catalog_.play_events();
    if (plays.empty()) return out;

    std::set<std::string> allowed;
    for (const auto& id : ids)
        if (const auto* r = catalog_.get_record(id)) allowed.insert(r->genre);

    std::int64_t last_day = 0;
    std::int64_t first_day = plays.front().day_index;
    for (const auto& ev : plays) {
        last_day = std::max(last_day, ev.day_index);
        first_day = std::min(first_day, ev.day_index);
    }
    const std::int64_t recent_start = last_day - kTrendWindowDays + 1;
    const std::int64_t previous_start = recent_start - kTrendWindowDays;
    const bool single_window = first_day >= recent_start;

    std::map<std::string, std::pair<std::int64_t, std::int64_t>> counts;  // genre -> (previous, recent)
    for (const auto& ev : plays) {
        const auto& genre = catalog_.get_record(ev.game_id)->genre;
        if (!allowed.empty() && !allowed.count(genre)) continue;
        if (ev.day_index >= recent_start)
            ++counts[genre].second;
        else if (ev.day_index >= previous_start)
            ++counts[genre].first;
    }

    const auto& vocab = catalog_.vocabulary().genres();
    auto vocab_pos = [&](const std::string& g) { return std::find(vocab.begin(), vocab.end(), g) - vocab.begin(); };
    std::vector<std::pair<std::string, std::int64_t>> ranked;
    for (const auto& [genre, c] : counts) ranked.emplace_back(genre, single_window ? c.second : c.second - c.first);
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return vocab_pos(a.first) < vocab_pos(b.first);
    });
    for (std::size_t i = 0; i < ranked.size() && i < kTrendTop; ++i) out.genres.push_back(ranked[i].first);
    if (single_window) out.note += " (single window of data: ranked by absolute count)";
    return out;
}

}  // namespace matcha
