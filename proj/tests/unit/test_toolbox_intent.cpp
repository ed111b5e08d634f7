#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "matcha/errors.hpp"
#include "matcha/intent.hpp"
#include "matcha/prompts.hpp"
#include "matcha/rng.hpp"
#include "matcha/text.hpp"
#include "matcha/toolbox.hpp"
#include "test_support.hpp"

using namespace matcha;
using namespace matcha::testing;

namespace {

const std::vector<GenreAlias>& desk_aliases() {
    static const auto a = parse_aliases(read_file(desk_dir() / "aliases.txt"));
    return a;
}

const Toolbox& desk_toolbox() {
    static const Toolbox t(desk_catalog(), desk_aliases());
    return t;
}

std::string id_by_name(const std::string& name) {
    for (const auto& g : desk_catalog().games())
        if (g.name == name) return g.id;
    return {};
}

}  // namespace

TEST_SUITE("toolbox") {
    TEST_CASE("metadata lookups") {
        auto c = catalog_of({{"g1", "Dungeon Days", "RPG", "Slay, loot, repeat.", 10, {Device::PC, Device::Console}},
                             {"g2", "Blank", "Horror", "", 5}});
        Toolbox t(c);
        CHECK(t.get_game_name("g1") == "Dungeon Days");
        CHECK(t.get_game_genre("g1") == "RPG");
        CHECK(t.get_game_description("g2").empty());
        CHECK(t.get_game_rank("g2") == 2);
        CHECK(t.get_game_info_str("g1") == "Dungeon Days, RPG, Slay, loot, repeat.");
        CHECK_THROWS_AS(t.get_game_name("zz"), NotFound);
        CHECK_THROWS_AS(t.get_game_genre("zz"), NotFound);
        CHECK_THROWS_AS(t.get_game_info_str("zz"), NotFound);
        CHECK(t.is_device_compatible("g1", "CONSOLE"));
        CHECK_FALSE(t.is_device_compatible("g1", "VR"));
        CHECK_THROWS_AS(t.is_device_compatible("g1", "TOASTER"), InvalidDevice);
    }

    TEST_CASE("every desk game reports a vocabulary genre") {
        for (const auto& g : desk_catalog().games())
            CHECK(desk_catalog().vocabulary().contains(desk_toolbox().get_game_genre(g.id)));
    }

    TEST_CASE("fuzzy name: acronym, exact name, no match") {
        const auto mm2 = desk_toolbox().get_game_id_from_fuzzy_name("MM2");
        REQUIRE(mm2);
        CHECK(mm2->game_id == id_by_name("Murder Mystery 2"));
        CHECK(mm2->score == doctest::Approx(1.0));

        const auto exact = desk_toolbox().get_game_id_from_fuzzy_name("Pet Simulator Ninety");
        REQUIRE(exact);
        CHECK(exact->game_id == "G3");
        CHECK(exact->score == doctest::Approx(1.0));
    }

    TEST_CASE("fuzzy name: qqqq is below threshold for every desk game (brute force)") {
        double best = 0.0;
        for (const auto& g : desk_catalog().games()) {
            // Independent oracle: Jaccard over padded trigrams.
            auto grams = [](const std::string& s) {
                std::string padded = "  " + text::join(text::word_tokens(s), " ") + " ";
                std::set<std::string> out;
                for (std::size_t i = 0; i + 3 <= padded.size(); ++i) out.insert(padded.substr(i, 3));
                return out;
            };
            const auto a = grams("qqqq"), b = grams(g.name);
            std::size_t inter = 0;
            for (const auto& x : a) inter += b.count(x);
            const double jac = static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
            CHECK(Toolbox::fuzzy_name_score("qqqq", g.name) == doctest::Approx(jac));
            best = std::max(best, jac);
        }
        CHECK(best < Toolbox::kFuzzyNameThreshold);
        CHECK_FALSE(desk_toolbox().get_game_id_from_fuzzy_name("qqqq"));
    }

    TEST_CASE("fuzzy genre") {
        CHECK(desk_toolbox().fuzzy_genre_to_genres("simulation") == std::vector<std::string>{"Simulator/Clicker"});
        CHECK(desk_toolbox().fuzzy_genre_to_genres("Tower Defense") == std::vector<std::string>{"Tower Defense"});
        CHECK(desk_toolbox().fuzzy_genre_to_genres("zzz").empty());
        for (const auto& g : desk_catalog().vocabulary().genres())
            CHECK(text::trigram_similarity("zzz", g) < Toolbox::kFuzzyGenreThreshold);
        const auto rac = desk_toolbox().fuzzy_genre_to_genres("racin");
        REQUIRE_FALSE(rac.empty());
        CHECK(rac.front() == "Racing");
    }

    TEST_CASE("search") {
        CHECK_THROWS_AS(desk_toolbox().get_search_results("one two three four"), QueryTooLong);
        CHECK(desk_toolbox().get_search_results("xylophonic").empty());
        auto c = catalog_of({{"a", "Common Quest", "RPG", "common words", 50},
                             {"b", "Zanzibar Common", "RPG", "common", 10},
                             {"c", "Other", "RPG", "nothing", 90}});
        Toolbox t(c);
        CHECK(t.get_search_results("zanzibar").front() == "b");
        CHECK(t.get_search_results("common") == std::vector<std::string>{"a", "b"});
        CHECK(t.get_search_results("zanzibar common").front() == "b");
        CHECK(desk_toolbox().get_search_results("game").size() <= Toolbox::kSearchCap);
    }

    TEST_CASE("collaborative filtering counts (brute force fixture)") {
        auto c = numbered_catalog(5, {{"u1", "g1", 0}, {"u1", "g2", 0}, {"u1", "g3", 0}, {"u2", "g1", 1}, {"u2", "g2", 1}});
        Toolbox t(c);
        CHECK(t.get_similar_games_cf("g1") == std::vector<std::string>{"g2", "g3"});
        CHECK(t.get_similar_games_cf("g5").empty());
        for (const auto& g : c.games()) {
            const auto out = t.get_similar_games_cf(g.id);
            CHECK(std::find(out.begin(), out.end(), g.id) == out.end());
        }
    }

    TEST_CASE("content similarity matches hand-computed cosines") {
        // a={red:2,blue:1} b={red:1,blue:2} c={red:1,green:1}
        // cos(a,b)=4/5, cos(a,c)=2/sqrt(10), cos(b,c)=1/sqrt(10)
        auto c = catalog_of({{"a", "", "RPG", "red red blue", 3}, {"b", "", "RPG", "red blue blue", 2},
                             {"c", "", "RPG", "red green", 1}, {"d", "", "RPG", "purple", 0}});
        Toolbox t(c);
        CHECK(t.content_similarity("a", "b") == doctest::Approx(0.8));
        CHECK(t.content_similarity("a", "c") == doctest::Approx(2.0 / std::sqrt(10.0)));
        CHECK(t.content_similarity("b", "c") == doctest::Approx(1.0 / std::sqrt(10.0)));
        CHECK(t.get_similar_games_content("a") == std::vector<std::string>{"b", "c"});
        CHECK(t.get_similar_games_content("c") == std::vector<std::string>{"a", "b"});
        CHECK(t.get_similar_games_content("d").empty());

        auto twins = catalog_of({{"x", "", "RPG", "same words here", 1}, {"y", "", "RPG", "same words here", 1}});
        Toolbox tt(twins);
        CHECK(tt.get_similar_games_content("x").front() == "y");
        CHECK(tt.get_similar_games_content("y").front() == "x");
        CHECK(tt.content_similarity("x", "y") == doctest::Approx(1.0));
    }

    TEST_CASE("age group, mood, default games") {
        const auto ages = desk_toolbox().get_games_by_age_group("18-24");
        CHECK(ages.size() <= Toolbox::kAgeGroupCap);
        for (const auto& id : ages) CHECK(desk_catalog().get_record(id)->age_groups.count("18-24"));
        CHECK_THROWS_AS(desk_toolbox().get_games_by_age_group("99+"), InvalidAgeGroup);
        CHECK(Toolbox(numbered_catalog(3)).get_games_by_age_group("18-24").empty());

        const auto relaxed = desk_toolbox().suggest_games_based_on_mood("Relaxing");
        CHECK_FALSE(relaxed.empty());
        CHECK(relaxed.size() <= Toolbox::kMoodCap);
        for (const auto& id : relaxed) CHECK(desk_catalog().get_record(id)->mood_tags.count("relaxing"));
        CHECK(desk_toolbox().suggest_games_based_on_mood("melancholic").empty());

        auto all = desk_toolbox().get_default_games(100, 5);
        CHECK(std::set<std::string>(all.begin(), all.end()).size() == 100);
        CHECK(all == desk_toolbox().get_default_games(100, 5));
        CHECK(desk_toolbox().get_default_games(0, 5).empty());
    }

    TEST_CASE("enumerated info") {
        auto c = catalog_of({{"a", "Alpha", "RPG", "first", 2}, {"b", "Beta", "Horror", "second", 1}});
        Toolbox t(c);
        CHECK(t.game_ids_to_enum_game_info({"a", "b"}) == "1. Alpha, RPG, first\n2. Beta, Horror, second");
        CHECK(t.game_ids_to_enum_game_info({}).empty());
        CHECK(t.game_ids_to_enum_game_info({"a", "zz"}) == "1. Alpha, RPG, first\n2. [unknown]");
    }

    TEST_CASE("dislike filter") {
        auto c = catalog_of({{"a", "", "RPG", "", 3}, {"b", "", "Horror", "", 2}, {"c", "", "RPG", "", 1}});
        Toolbox t(c);
        CHECK(t.filter_by_dislike_genres({"a", "b", "c"}, {"Horror"}) == std::vector<std::string>{"a", "c"});
        CHECK(t.filter_by_dislike_genres({"a", "b", "c"}, {}) == std::vector<std::string>{"a", "b", "c"});
        CHECK(t.filter_by_dislike_genres({"a", "c"}, {"RPG"}).empty());
    }

    TEST_CASE("trend windows (brute force counts)") {
        // g4 is RPG, g1 is Action: RPG goes 5 -> 10, Action flat at 4.
        std::vector<PlayEvent> plays;
        for (int i = 0; i < 5; ++i) plays.push_back({"p" + std::to_string(i), "g4", i % 7});
        for (int i = 0; i < 10; ++i) plays.push_back({"r" + std::to_string(i), "g4", 7 + i % 7});
        for (int i = 0; i < 4; ++i) plays.push_back({"a" + std::to_string(i), "g1", i});
        for (int i = 0; i < 4; ++i) plays.push_back({"b" + std::to_string(i), "g1", 8 + i});
        auto c = numbered_catalog(6, plays);
        REQUIRE(c.get_record("g4")->genre == "RPG");
        Toolbox t(c);
        const auto f = t.predict_next_popular_genre({});
        REQUIRE_FALSE(f.genres.empty());
        CHECK(f.genres.front() == "RPG");
        CHECK(f.note.find("approximation") != std::string::npos);

        CHECK(Toolbox(numbered_catalog(3)).predict_next_popular_genre({}).genres.empty());

        auto single = numbered_catalog(6, {{"u", "g1", 0}, {"v", "g4", 1}, {"w", "g4", 2}});
        CHECK(Toolbox(single).predict_next_popular_genre({}).genres == std::vector<std::string>{"RPG", "Action"});
    }

    TEST_CASE("desk trend favours RPG") {
        CHECK(desk_toolbox().predict_next_popular_genre({}).genres.front() == "RPG");
    }

    TEST_CASE("property: every tool returns resolvable ids within caps") {
        const auto& t = desk_toolbox();
        SeededRng rng(5);
        for (int i = 0; i < 40; ++i) {
            const auto id = "G" + std::to_string(1 + rng.below(100));
            for (const auto& list : {t.get_similar_games_cf(id), t.get_similar_games_content(id)}) {
                CHECK(list.size() <= Toolbox::kSimilarCap);
                for (const auto& x : list) CHECK(desk_catalog().contains(x));
            }
        }
    }
}

TEST_SUITE("intent") {
    TEST_CASE("scripted extraction resolves titles and genres") {
        const auto i = intent_from_extraction("LIKED_GAMES: MM2\nGENRES: simulation\nDEVICE: mobile\nAGE_GROUP: 13-17\n"
                                              "MOOD: Relaxing\nSOCIAL: multiplayer",
                                              "q", desk_toolbox());
        CHECK(i.liked_game_ids == std::vector<std::string>{id_by_name("Murder Mystery 2")});
        CHECK(i.preferred_genres == std::vector<std::string>{"Simulator/Clicker"});
        CHECK(i.device == Device::Mobile);
        CHECK(i.age_group == "13-17");
        CHECK(i.mood == "relaxing");
        CHECK(i.social_mode == SocialMode::Multiplayer);
        CHECK(satisfies_invariants(i, desk_catalog()));
    }

    TEST_CASE("empty block gives empty intent with free text") {
        const auto i = intent_from_extraction("", "hello there", desk_toolbox());
        CHECK(i.liked_game_ids.empty());
        CHECK(i.preferred_genres.empty());
        CHECK_FALSE(i.device);
        CHECK_FALSE(i.has_constraints());
        CHECK(i.free_text == "hello there");
    }

    TEST_CASE("dislike wins over like") {
        const auto i = intent_from_extraction("GENRES: Horror, RPG\nDISLIKED_GENRES: scary", "q", desk_toolbox());
        CHECK(i.preferred_genres == std::vector<std::string>{"RPG"});
        CHECK(i.disliked_genres == std::vector<std::string>{"Horror"});
    }

    TEST_CASE("unresolvable titles are kept raw; junk fields ignored") {
        const auto i = intent_from_extraction("LIKED_GAMES: qqqq\nDEVICE: fridge\nAGE_GROUP: 99\nSOCIAL: maybe", "q",
                                              desk_toolbox());
        CHECK(i.liked_game_ids.empty());
        CHECK(i.liked_fuzzy_names == std::vector<std::string>{"qqqq"});
        CHECK_FALSE(i.device);
        CHECK_FALSE(i.age_group);
        CHECK_FALSE(i.social_mode);
    }

    TEST_CASE("property: random garbage never breaks invariants") {
        SeededRng rng(11);
        const std::vector<std::string> pieces = {"GENRES:", "DISLIKED_GENRES:", "LIKED_GAMES:", "Horror", "rpg", ",",
                                                 "\n", "MM2", "DEVICE:", "VR", "none", "::", "sim", "AGE_GROUP:", "<13"};
        for (int trial = 0; trial < 200; ++trial) {
            std::string block;
            const auto n = rng.below(25);
            for (std::size_t k = 0; k < n; ++k) block += pieces[rng.below(pieces.size())] + " ";
            const auto i = intent_from_extraction(block, "q", desk_toolbox());
            CHECK(satisfies_invariants(i, desk_catalog()));
        }
    }

    TEST_CASE("parse_intent via mock; provider errors propagate") {
        MockRig rig;
        auto& m = rig.add("llm");
        m.register_script("intent:I love MM2", "LIKED_GAMES: MM2\nGENRES: horror");
        m.register_error("intent:boom", 500);
        PromptSet prompts;
        const auto i = parse_intent("I love MM2", *rig.gateway, "llm", desk_toolbox(), prompts);
        CHECK(i.liked_game_ids.size() == 1);
        CHECK(i.preferred_genres == std::vector<std::string>{"Horror"});
        CHECK(parse_intent("I love MM2", *rig.gateway, "llm", desk_toolbox(), prompts).liked_game_ids ==
              i.liked_game_ids);
        CHECK_THROWS_AS(parse_intent("boom", *rig.gateway, "llm", desk_toolbox(), prompts), ProviderError);
    }
}
