#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "matcha/agent_context.hpp"
#include "matcha/catalog.hpp"
#include "matcha/metrics.hpp"
#include "matcha/risk_control.hpp"

namespace matcha {

class Engine;

struct RequestRecord {
    std::string request_id;
    std::string query;
    std::vector<std::string> ground_truth_ids;
};

// One JSON object per line: {request_id, query, ground_truth_ids}.
std::vector<RequestRecord> parse_corpus(std::string_view content);

// One prompt per line; blank lines skipped.
std::vector<std::string> parse_prompt_lines(std::string_view content);

struct Recommendation {
    std::vector<std::string> ids;
    std::map<std::string, std::string> explanations;  // game id -> summary
    bool blocked = false;
};

// (request, number of items wanted, per-request seed) -> ranked ids.
using Recommender = std::function<Recommendation(const RequestRecord&, std::size_t, std::uint64_t)>;

// (query, game id, explanation) -> score in [0,5] or nullopt when unparseable.
using ExplanationJudge = std::function<std::optional<double>(const std::string&, const std::string&, const std::string&)>;

struct RequestRow {
    std::string request_id;
    std::vector<std::string> recs;
    double factual = 0.0;
    int hit = 0;
    double precision = 0.0;
    double pop50 = 0.0;
    double gt_pop50 = 0.0;
    std::optional<double> rpop50;
    bool failed = false;
    std::string error;
};

struct RunReport {
    std::size_t k = 0;
    std::size_t num_requests = 0;
    double factual = 0.0;
    double hit = 0.0;
    double precision = 0.0;
    double pop50 = 0.0;
    std::optional<double> rpop50;  // mean over requests with defined RPop50
    std::size_t rpop50_excluded = 0;
    double entropy = 0.0;
    double maxfreq = 0.0;
    std::optional<double> jp_rate;
    std::optional<double> false_block_rate;
    std::optional<double> exp_score;
    std::size_t exp_scored = 0;
    std::size_t exp_excluded = 0;
    std::vector<RequestRow> per_request;
};

struct EvalOptions {
    std::vector<std::size_t> k_values{5, 10};
    std::uint64_t seed = 0;
    std::optional<ExplanationJudge> judge;
};

/// Runs `recommender` once per request (asking for max k items) and scores
/// every k. Request failures become empty lists. Throws PreconditionError on
/// an empty corpus.
std::vector<RunReport> run_eval(const std::vector<RequestRecord>& corpus, const Recommender& recommender,
                                const Catalog& catalog, const EvalOptions& options);

// Seeded sample without replacement from the 50 most popular games.
std::vector<std::string> pop_baseline(const Catalog& catalog, std::size_t k, std::uint64_t seed);
Recommender pop_recommender(const Catalog& catalog);
Recommender engine_recommender(const Engine& engine);

// Final "SCORE: x" line, clamped to [0,5] and rounded to the nearest 0.5.
std::optional<double> parse_judge_score(std::string_view response);

std::optional<double> judge_explanation(const std::string& query, const std::string& game_id,
                                        const std::string& explanation, const std::string& judge_provider,
                                        const AgentContext& ctx, std::vector<std::string>* notes = nullptr);

struct PromptVerdict {
    std::string prompt;
    SafetyVerdict verdict;
};

struct JailbreakReport {
    std::size_t total = 0;
    std::size_t blocked = 0;
    double rate = 0.0;  // blocked / total (0 for an empty suite)
    std::vector<PromptVerdict> verdicts;
};

using Screen = std::function<SafetyVerdict(const std::string&)>;

JailbreakReport jailbreak_prevention_rate(const std::vector<std::string>& prompts, const Screen& screen);

nlohmann::json to_json(const RunReport& report);
std::string format_table(const std::vector<RunReport>& reports);

}  // namespace matcha
