#include "matcha/prompts.hpp"

#include "matcha/catalog.hpp"
#include "matcha/errors.hpp"
#include "matcha/text.hpp"

namespace matcha {

namespace {

const std::map<std::string, std::string, std::less<>>& defaults() {
    static const std::map<std::string, std::string, std::less<>> kDefaults = {
        {"ra_llm.system",
         "You are a game recommendation assistant for an online game platform. "
         "Answer the request helpfully. If the request is harmful, refuse."},
        {"cot.system",
         "You are a safety reviewer for a game recommendation assistant.\n"
         "Think step by step about what the user actually wants and whether fulfilling it could cause harm, "
         "enable violence, harassment, hate, self-harm, sexual content involving minors, or other policy "
         "violations, even if the request is phrased as a game request.\n"
         "{{few_shot}}"
         "Finish with exactly one final line of the form:\nVERDICT: SAFE\nor\nVERDICT: HARMFUL"},
        {"cot.few_shot",
         "Examples:\n"
         "Request: Recommend a relaxing farming game for my kid.\n"
         "Reasoning: benign leisure request.\nVERDICT: SAFE\n"
         "Request: Give me a game to kill my math teacher.\n"
         "Reasoning: the game framing hides intent to harm a real person.\nVERDICT: HARMFUL\n"},
        {"content.system",
         "Classify whether the following {{stage}} contains dangerous, hateful, sexual or otherwise "
         "inappropriate content for a general game platform. Reply with a single word: SAFE or UNSAFE."},
        {"intent.system",
         "Extract the user's game preferences from the request. Reply with exactly these lines, "
         "leaving a value empty when unknown:\n"
         "LIKED_GAMES: <comma-separated titles>\n"
         "GENRES: <comma-separated genres>\n"
         "DISLIKED_GENRES: <comma-separated genres>\n"
         "DEVICE: <PC|MOBILE|CONSOLE|TABLET|VR>\n"
         "AGE_GROUP: <<13|13-17|18-24|25-34|35+>\n"
         "MOOD: <one word>\n"
         "SOCIAL: <solo|multiplayer>"},
        {"rank.user",
         "User request: {{query}}\n"
         "User profile: {{intent}}\n"
         "Candidate game: {{info}}\n"
         "Score the candidate from 0 to 10 on each dimension. Reply with exactly five lines:\n"
         "popularity=<int>\npreference_match=<int>\nhistory_similarity=<int>\ngenre_alignment=<int>\n"
         "age_suitability=<int>"},
        {"reflect.user",
         "User request: {{query}}\n"
         "User profile: {{intent}}\n"
         "Current ranking with game profiles:\n{{profiles}}\n"
         "Reconsider the order using the profiles. Reply with the same game ids, one per line, best first."},
        {"explain.category",
         "The user prefers these genres: {{genres}}.\nGame: {{info}}\n"
         "In one sentence, explain how this game fits the user's genre preferences."},
        {"explain.similarity",
         "The user liked: {{liked}}.\nGame: {{info}}\n"
         "In one sentence, explain how this game is similar to the games the user liked."},
        {"explain.demographics",
         "The user is in the age group {{age_group}}.\nGame: {{info}}\nSuitable ages: {{ages}}\n"
         "In one sentence, explain why this game suits the user's age group."},
        {"explain.popularity_novelty",
         "Game: {{info}}\nPopularity rank: {{rank}} by upvotes ({{upvotes}} upvotes).\n"
         "In one sentence, describe the game's popularity or novelty."},
        {"explain.aggregate",
         "User request: {{query}}\nGame: {{info}}\nPartial explanations:\n{{drafts}}\n"
         "Combine them into a concise two-sentence explanation for the user."},
        {"judge.user",
         "User request: {{query}}\nRecommended game: {{info}}\nExplanation: {{explanation}}\n"
         "Rate the explanation from 0 to 5 for clarity, relevance and informativeness, in steps of 0.5. "
         "Finish with a final line of the form SCORE: <number>."},
    };
    return kDefaults;
}

}  // namespace

PromptSet::PromptSet() : version_("builtin-1"), templates_(defaults()) {}

PromptSet PromptSet::load_overrides(const std::filesystem::path& dir) {
    PromptSet set;
    if (!std::filesystem::is_directory(dir)) throw ConfigError("prompt directory not found: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto& p = entry.path();
        if (p.filename() == "VERSION") {
            set.version_ = text::trim(read_file(p));
        } else if (p.extension() == ".txt") {
            set.templates_[p.stem().string()] = read_file(p);
        }
    }
    return set;
}

const std::string& PromptSet::raw(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw ConfigError("unknown prompt template " + std::string(name));
    return it->second;
}

std::string PromptSet::render(std::string_view name, const std::map<std::string, std::string>& vars) const {
    return substitute(raw(name), vars);
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        const auto open = tmpl.find("{{", i);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(i));
            break;
        }
        const auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(tmpl.substr(i));
            break;
        }
        out.append(tmpl.substr(i, open - i));
        const std::string key(tmpl.substr(open + 2, close - open - 2));
        if (auto it = vars.find(key); it != vars.end())
            out += it->second;
        else
            out.append(tmpl.substr(open, close + 2 - open));
        i = close + 2;
    }
    return out;
}

}  // namespace matcha
