#include "matcha/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "matcha/errors.hpp"
#include "matcha/pipeline.hpp"
#include "matcha/rng.hpp"
#include "matcha/text.hpp"

namespace matcha {

std::vector<RequestRecord> parse_corpus(std::string_view content) {
    std::vector<RequestRecord> out;
    std::set<std::string> seen;
    auto ls = text::lines(content);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (text::trim(ls[i]).empty()) continue;
        const auto obj = nlohmann::json::parse(ls[i], nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) throw ParseError(i + 1, "corpus line is not a JSON object");
        RequestRecord r;
        if (!obj.contains("request_id") || !obj.contains("query") || !obj.contains("ground_truth_ids"))
            throw ParseError(i + 1, "corpus line needs request_id, query, ground_truth_ids");
        const auto& rid = obj["request_id"];
        r.request_id = rid.is_string() ? rid.get<std::string>() : rid.dump();
        if (!obj["query"].is_string()) throw ParseError(i + 1, "query must be a string");
        r.query = obj["query"].get<std::string>();
        if (!obj["ground_truth_ids"].is_array() || obj["ground_truth_ids"].empty())
            throw ParseError(i + 1, "ground_truth_ids must be a non-empty array");
        for (const auto& g : obj["ground_truth_ids"]) {
            if (!g.is_string()) throw ParseError(i + 1, "ground_truth_ids must be strings");
            r.ground_truth_ids.push_back(g.get<std::string>());
        }
        if (!seen.insert(r.request_id).second) throw ParseError(i + 1, "duplicate request_id " + r.request_id);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> parse_prompt_lines(std::string_view content) {
    std::vector<std::string> out;
    for (const auto& line : text::lines(content)) {
        auto t = text::trim(line);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::vector<RunReport> run_eval(const std::vector<RequestRecord>& corpus, const Recommender& recommender,
                                const Catalog& catalog, const EvalOptions& options) {
    if (corpus.empty()) throw PreconditionError("evaluation corpus is empty");
    if (options.k_values.empty()) throw PreconditionError("no k values requested");
    for (auto k : options.k_values)
        if (k == 0) throw PreconditionError("k must be positive");
    const auto max_k = *std::max_element(options.k_values.begin(), options.k_values.end());

    struct Outcome {
        Recommendation rec;
        bool failed = false;
        std::string error;
        std::map<std::string, std::optional<double>> judged;
    };
    std::vector<Outcome> outcomes(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto& o = outcomes[i];
        try {
            o.rec = recommender(corpus[i], max_k, options.seed + i);
        } catch (const std::exception& e) {
            o.failed = true;
            o.error = e.what();
            o.rec = Recommendation{};
        }
        if (options.judge) {
            for (std::size_t j = 0; j < std::min(max_k, o.rec.ids.size()); ++j) {
                const auto& id = o.rec.ids[j];
                if (auto it = o.rec.explanations.find(id); it != o.rec.explanations.end())
                    o.judged[id] = (*options.judge)(corpus[i].query, id, it->second);
            }
        }
    }

    std::vector<RunReport> reports;
    for (auto k : options.k_values) {
        RunReport rep;
        rep.k = k;
        rep.num_requests = corpus.size();
        std::vector<metrics::RecList> lists;
        double rpop_sum = 0.0;
        std::size_t rpop_n = 0;
        double exp_sum = 0.0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto& o = outcomes[i];
            RequestRow row;
            row.request_id = corpus[i].request_id;
            row.recs.assign(o.rec.ids.begin(), o.rec.ids.begin() + static_cast<std::ptrdiff_t>(std::min(k, o.rec.ids.size())));
            row.failed = o.failed;
            row.error = o.error;
            row.factual = metrics::factual_at_k(o.rec.ids, catalog, k);
            row.hit = metrics::hit_at_k(o.rec.ids, corpus[i].ground_truth_ids, k);
            row.precision = metrics::precision_at_k(o.rec.ids, corpus[i].ground_truth_ids, k);
            row.pop50 = metrics::pop50_at_k(o.rec.ids, catalog, k);
            row.gt_pop50 = metrics::pop50_of_set(corpus[i].ground_truth_ids, catalog);
            row.rpop50 = metrics::rpop50_at_k(row.pop50, row.gt_pop50);
            rep.factual += row.factual;
            rep.hit += row.hit;
            rep.precision += row.precision;
            rep.pop50 += row.pop50;
            if (row.rpop50) {
                rpop_sum += *row.rpop50;
                ++rpop_n;
            } else {
                ++rep.rpop50_excluded;
            }
            for (const auto& id : row.recs) {
                auto it = o.judged.find(id);
                if (it == o.judged.end()) continue;
                if (it->second) {
                    exp_sum += *it->second;
                    ++rep.exp_scored;
                } else {
                    ++rep.exp_excluded;
                }
            }
            lists.push_back(o.rec.ids);
            rep.per_request.push_back(std::move(row));
        }
        const auto n = static_cast<double>(corpus.size());
        rep.factual /= n;
        rep.hit /= n;
        rep.precision /= n;
        rep.pop50 /= n;
        if (rpop_n) rep.rpop50 = rpop_sum / static_cast<double>(rpop_n);
        rep.entropy = metrics::entropy_at_k(lists, k);
        rep.maxfreq = metrics::maxfreq_at_k(lists, k, corpus.size());
        if (rep.exp_scored) rep.exp_score = exp_sum / static_cast<double>(rep.exp_scored);
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::vector<std::string> pop_baseline(const Catalog& catalog, std::size_t k, std::uint64_t seed) {
    SeededRng rng(seed);
    return rng.sample(catalog.top_n_popular(metrics::kPopularCutoff), k);
}

Recommender pop_recommender(const Catalog& catalog) {
    return [&catalog](const RequestRecord&, std::size_t k, std::uint64_t seed) {
        return Recommendation{pop_baseline(catalog, k, seed), {}, false};
    };
}

Recommender engine_recommender(const Engine& engine) {
    return [&engine](const RequestRecord& req, std::size_t k, std::uint64_t seed) {
        auto result = engine.recommend(req.query, k, seed);
        Recommendation rec;
        rec.blocked = result.blocked;
        rec.ids = result.top_ids();
        for (const auto& [id, e] : result.explanations) rec.explanations[id] = e.summary;
        return rec;
    };
}

std::optional<double> parse_judge_score(std::string_view response) {
    auto ls = text::lines(response);
    std::string last;
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
        last = text::trim(*it);
        if (!last.empty()) break;
    }
    if (!text::starts_with_ci(last, "SCORE:")) return std::nullopt;
    const auto value = text::trim(std::string_view(last).substr(6));
    double x = 0.0;
    try {
        std::size_t used = 0;
        x = std::stod(value, &used);
        if (used != value.size()) return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (!std::isfinite(x)) return std::nullopt;
    x = std::clamp(x, 0.0, 5.0);
    return std::round(x * 2.0) / 2.0;
}

std::optional<double> judge_explanation(const std::string& query, const std::string& game_id,
                                        const std::string& explanation, const std::string& judge_provider,
                                        const AgentContext& ctx, std::vector<std::string>* notes) {
    const auto info = ctx.catalog().contains(game_id) ? ctx.toolbox.get_game_info_str(game_id) : game_id;
    const auto body = ctx.prompts.render("judge.user", {{"query", query}, {"info", info}, {"explanation", explanation}});
    try {
        auto resp = ctx.gateway.complete(make_request(judge_provider, "judge", game_id + "\n" + body));
        auto score = parse_judge_score(resp.content);
        if (!score && notes) notes->push_back("unparseable judge score for " + game_id);
        return score;
    } catch (const ProviderFailure& e) {
        if (notes) notes->push_back("judge failed for " + game_id + ": " + e.what());
        return std::nullopt;
    }
}

JailbreakReport jailbreak_prevention_rate(const std::vector<std::string>& prompts, const Screen& screen) {
    JailbreakReport rep;
    rep.total = prompts.size();
    for (const auto& p : prompts) {
        auto v = screen(p);
        if (v.flagged) ++rep.blocked;
        rep.verdicts.push_back({p, std::move(v)});
    }
    rep.rate = rep.total ? static_cast<double>(rep.blocked) / static_cast<double>(rep.total) : 0.0;
    return rep;
}

nlohmann::json to_json(const RunReport& r) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json rows = json::array();
    for (const auto& row : r.per_request) {
        json j{{"request_id", row.request_id}, {"recs", row.recs},           {"factual", row.factual},
               {"hit", row.hit},               {"precision", row.precision}, {"pop50", row.pop50},
               {"gt_pop50", row.gt_pop50},     {"rpop50", opt(row.rpop50)},  {"failed", row.failed}};
        if (row.failed) j["error"] = row.error;
        rows.push_back(std::move(j));
    }
    return json{{"k", r.k},
                {"num_requests", r.num_requests},
                {"factual", r.factual},
                {"hit", r.hit},
                {"precision", r.precision},
                {"pop50", r.pop50},
                {"rpop50", opt(r.rpop50)},
                {"rpop50_abs_dev", r.rpop50 ? json(std::abs(*r.rpop50 - 1.0)) : json(nullptr)},
                {"rpop50_excluded", r.rpop50_excluded},
                {"entropy", r.entropy},
                {"maxfreq", r.maxfreq},
                {"jp_rate", opt(r.jp_rate)},
                {"false_block_rate", opt(r.false_block_rate)},
                {"exp_score", opt(r.exp_score)},
                {"exp_scored", r.exp_scored},
                {"exp_excluded", r.exp_excluded},
                {"per_request", rows}};
}

std::string format_table(const std::vector<RunReport>& reports) {
    std::ostringstream os;
    const char* headers[] = {"k", "Factual", "Hit", "P", "Pop50", "RPop50", "|RPop50-1|", "E", "MaxF", "JP", "FalseBlk", "Exp"};
    for (const auto* h : headers) os << std::setw(11) << h;
    os << "\n";
    auto cell = [&](const std::optional<double>& v, int precision = 3) {
        if (v)
            os << std::setw(11) << std::fixed << std::setprecision(precision) << *v;
        else
            os << std::setw(11) << "-";
    };
    for (const auto& r : reports) {
        os << std::setw(11) << r.k;
        cell(r.factual);
        cell(r.hit);
        cell(r.precision);
        cell(r.pop50);
        cell(r.rpop50);
        cell(r.rpop50 ? std::optional<double>(std::abs(*r.rpop50 - 1.0)) : std::nullopt);
        cell(r.entropy);
        cell(r.maxfreq);
        cell(r.jp_rate);
        cell(r.false_block_rate);
        cell(r.exp_score, 2);
        os << "\n";
    }
    return os.str();
}

}  // namespace matcha
