#include "matcha/risk_control.hpp"

#include <array>

#include <json.hpp>

#include "matcha/errors.hpp"
#include "matcha/rng.hpp"
#include "matcha/text.hpp"

namespace matcha {

namespace {

constexpr std::array<std::pair<SafetyStage, std::string_view>, 4> kStages = {{
    {SafetyStage::RaLlm, "ra_llm"},
    {SafetyStage::CotIntent, "cot_intent"},
    {SafetyStage::ContentInput, "content_input"},
    {SafetyStage::ContentOutput, "content_output"},
}};

constexpr std::array<std::string_view, 12> kRefusalPrefixes = {
    "i can't",  "i cannot",   "i can\xE2\x80\x99t", "i won't",       "i will not",        "i'm sorry",
    "i am sorry", "i'm unable", "i am unable",      "sorry, but i", "i must decline", "as an ai",
};

std::string last_nonempty_line(std::string_view s) {
    auto ls = text::lines(s);
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
        auto t = text::trim(*it);
        if (!t.empty()) return t;
    }
    return {};
}

}  // namespace

std::string_view to_string(SafetyStage s) {
    for (const auto& [stage, label] : kStages)
        if (stage == s) return label;
    return "?";
}

std::optional<SafetyStage> parse_stage(std::string_view label) {
    for (const auto& [stage, name] : kStages)
        if (name == label) return stage;
    return std::nullopt;
}

void validate(const RaLlmConfig& cfg) {
    if (cfg.num_samples < 1) throw ConfigError("ra_llm.num_samples must be >= 1");
    if (!(cfg.drop_ratio > 0.0 && cfg.drop_ratio < 1.0)) throw ConfigError("ra_llm.drop_ratio must be in (0,1)");
    if (cfg.refusal_threshold < 0.0 || cfg.refusal_threshold > 1.0)
        throw ConfigError("ra_llm.refusal_threshold must be in [0,1]");
}

std::vector<FallbackPolicy> parse_policies(std::string_view json_text) {
    auto doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw ConfigError("policies file must be a JSON array");
    std::vector<FallbackPolicy> out;
    for (const auto& item : doc) {
        FallbackPolicy p;
        p.policy_id = item.value("policy_id", "");
        p.response_text = item.value("response_text", "");
        if (p.response_text.empty()) throw ConfigError("policy " + p.policy_id + " has empty response_text");
        for (const auto& st : item.value("trigger_stages", nlohmann::json::array())) {
            auto stage = st.is_string() ? parse_stage(st.get<std::string>()) : std::nullopt;
            if (!stage) throw ConfigError("policy " + p.policy_id + " has an unknown trigger stage");
            p.trigger_stages.insert(*stage);
        }
        out.push_back(std::move(p));
    }
    return out;
}

DenyList::DenyList(std::vector<std::string> terms) : raw_(std::move(terms)) {
    for (const auto& t : raw_) {
        auto toks = text::word_tokens(t);
        if (!toks.empty()) terms_.push_back(std::move(toks));
    }
}

DenyList DenyList::parse(std::string_view content) {
    std::vector<std::string> terms;
    for (const auto& line : text::lines(content)) {
        auto t = text::trim(line);
        if (!t.empty() && t[0] != '#') terms.push_back(text::to_lower(t));
    }
    return DenyList(std::move(terms));
}

std::optional<std::string> DenyList::match(std::string_view input) const {
    const auto toks = text::word_tokens(input);
    for (const auto& term : terms_) {
        if (term.size() > toks.size()) continue;
        for (std::size_t i = 0; i + term.size() <= toks.size(); ++i) {
            if (std::equal(term.begin(), term.end(), toks.begin() + static_cast<std::ptrdiff_t>(i)))
                return text::join(term, " ");
        }
    }
    return std::nullopt;
}

bool is_refusal(std::string_view response_text) {
    const auto t = text::trim(response_text);
    if (t == "REFUSE") return true;
    for (auto prefix : kRefusalPrefixes)
        if (text::starts_with_ci(t, prefix)) return true;
    return false;
}

std::string perturb_prompt(std::string_view prompt, double drop_ratio, SeededRng& rng) {
    const auto tokens = text::split_whitespace(prompt);
    std::vector<std::string> kept;
    for (const auto& tok : tokens)
        if (!rng.bernoulli(drop_ratio)) kept.push_back(tok);
    if (kept.empty() && !tokens.empty()) kept.push_back(tokens.front());
    return text::join(kept, " ");
}

std::vector<std::string> ra_llm_perturbations(std::string_view prompt, const RaLlmConfig& cfg) {
    validate(cfg);
    SeededRng rng(cfg.rng_seed);
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(cfg.num_samples));
    for (int i = 0; i < cfg.num_samples; ++i) out.push_back(perturb_prompt(prompt, cfg.drop_ratio, rng));
    return out;
}

std::optional<bool> parse_cot_verdict(std::string_view response) {
    const auto line = text::to_upper(last_nonempty_line(response));
    constexpr std::string_view kPrefix = "VERDICT:";
    if (line.rfind(kPrefix, 0) != 0) return std::nullopt;
    const auto value = text::trim(std::string_view(line).substr(kPrefix.size()));
    if (value == "HARMFUL") return true;
    if (value == "SAFE") return false;
    return std::nullopt;
}

std::optional<bool> parse_content_label(std::string_view response) {
    auto words = text::word_tokens(last_nonempty_line(response));
    if (words.empty()) return std::nullopt;
    const auto& w = words.front();
    if (w == "safe" || w == "false" || w == "no") return false;
    if (w == "unsafe" || w == "harmful" || w == "true" || w == "yes" || w == "flagged") return true;
    return std::nullopt;
}

std::string fallback_response(const SafetyVerdict& verdict, const std::vector<FallbackPolicy>& policies) {
    if (!verdict.flagged) throw PreconditionError("fallback_response requires a flagged verdict");
    for (const auto& p : policies)
        if (p.trigger_stages.count(verdict.stage)) return p.response_text;
    return default_fallback_policy().response_text;
}

RiskController::RiskController(const Gateway& gateway, std::string provider_id, RiskConfig config,
                               DenyList deny_list, const PromptSet& prompts)
    : gateway_(gateway),
      provider_id_(std::move(provider_id)),
      config_(std::move(config)),
      deny_(std::move(deny_list)),
      prompts_(prompts) {
    validate(config_.ra_llm);
}

SafetyVerdict RiskController::ra_llm_check(std::string_view prompt) const {
    return ra_llm_check(prompt, config_.ra_llm);
}

SafetyVerdict RiskController::ra_llm_check(std::string_view prompt, const RaLlmConfig& cfg) const {
    if (text::trim(prompt).empty()) throw PreconditionError("ra_llm_check requires a non-empty prompt");
    const auto copies = ra_llm_perturbations(prompt, cfg);
    std::vector<ChatRequest> requests;
    requests.reserve(copies.size());
    const auto& system = prompts_.raw("ra_llm.system");
    for (const auto& copy : copies) requests.push_back(make_request(provider_id_, "ra", copy, system));

    const auto results = gateway_.complete_parallel(requests);
    int refusals = 0;
    for (const auto& r : results)
        if (!r.ok() || is_refusal(r.response->content)) ++refusals;

    SafetyVerdict v;
    v.stage = SafetyStage::RaLlm;
    v.refusal_fraction = static_cast<double>(refusals) / static_cast<double>(cfg.num_samples);
    v.flagged = *v.refusal_fraction >= cfg.refusal_threshold;
    v.reason = std::to_string(refusals) + "/" + std::to_string(cfg.num_samples) + " perturbed copies refused";
    return v;
}

SafetyVerdict RiskController::cot_intent_check(std::string_view prompt) const {
    if (text::trim(prompt).empty()) throw PreconditionError("cot_intent_check requires a non-empty prompt");
    const auto few_shot = config_.cot_few_shot ? prompts_.raw("cot.few_shot") : std::string();
    const auto system = prompts_.render("cot.system", {{"few_shot", few_shot}});

    SafetyVerdict v;
    v.stage = SafetyStage::CotIntent;
    try {
        auto resp = gateway_.complete(make_request(provider_id_, "cot", std::string(prompt), system));
        auto verdict = parse_cot_verdict(resp.content);
        if (!verdict) {
            v.flagged = true;
            v.reason = "unparseable verdict";
        } else {
            v.flagged = *verdict;
            v.reason = *verdict ? "harmful intent" : "safe intent";
        }
    } catch (const ProviderFailure& e) {
        v.flagged = true;
        v.reason = std::string("provider failure: ") + e.what();
    }
    return v;
}

SafetyVerdict RiskController::content_check(std::string_view input, SafetyStage stage) const {
    if (stage != SafetyStage::ContentInput && stage != SafetyStage::ContentOutput)
        throw PreconditionError("content_check stage must be content_input or content_output");
    SafetyVerdict v;
    v.stage = stage;
    if (auto term = deny_.match(input)) {
        v.flagged = true;
        v.reason = "deny-list term: " + *term;
        return v;
    }
    if (text::trim(input).empty()) {
        v.reason = "empty text";
        return v;
    }
    const std::string label = stage == SafetyStage::ContentInput ? "user request" : "recommendation output";
    const auto system = prompts_.render("content.system", {{"stage", label}});
    try {
        auto resp = gateway_.complete(make_request(provider_id_, std::string(to_string(stage)), std::string(input), system));
        auto flagged = parse_content_label(resp.content);
        v.flagged = flagged.value_or(true);
        v.reason = !flagged ? "unparseable label" : (*flagged ? "dangerous content" : "clean");
    } catch (const ProviderFailure& e) {
        v.flagged = true;
        v.reason = std::string("provider failure: ") + e.what();
    }
    return v;
}

SafetyVerdict RiskController::screen_input(std::string_view prompt, std::uint64_t seed) const {
    auto v = content_check(prompt, SafetyStage::ContentInput);
    if (v.flagged) return v;
    if (config_.enable_ra_llm) {
        auto cfg = config_.ra_llm;
        cfg.rng_seed += seed;
        v = ra_llm_check(prompt, cfg);
        if (v.flagged) return v;
    }
    if (config_.enable_cot) {
        v = cot_intent_check(prompt);
        if (v.flagged) return v;
    }
    return SafetyVerdict{false, v.stage, "all checks passed", v.refusal_fraction};
}

SafetyVerdict RiskController::screen_output(std::string_view output) const {
    return content_check(output, SafetyStage::ContentOutput);
}

}  // namespace matcha
