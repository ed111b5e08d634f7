#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "matcha/llm_gateway.hpp"
#include "matcha/prompts.hpp"
#include "matcha/rng.hpp"

namespace matcha {

enum class SafetyStage { RaLlm, CotIntent, ContentInput, ContentOutput };

std::string_view to_string(SafetyStage s);
std::optional<SafetyStage> parse_stage(std::string_view label);

struct SafetyVerdict {
    bool flagged = false;
    SafetyStage stage = SafetyStage::ContentInput;
    std::string reason;
    std::optional<double> refusal_fraction;  // set iff stage == RaLlm
};

struct RaLlmConfig {
    int num_samples = 8;
    double drop_ratio = 0.3;
    double refusal_threshold = 0.25;
    std::uint64_t rng_seed = 0;
};

void validate(const RaLlmConfig& cfg);

struct RiskConfig {
    RaLlmConfig ra_llm;
    bool enable_ra_llm = true;
    bool enable_cot = true;
    bool cot_few_shot = true;
};

struct FallbackPolicy {
    std::string policy_id;
    std::set<SafetyStage> trigger_stages;
    std::string response_text;
};

inline const FallbackPolicy& default_fallback_policy() {
    static const FallbackPolicy kDefault{
        "default",
        {SafetyStage::RaLlm, SafetyStage::CotIntent, SafetyStage::ContentInput, SafetyStage::ContentOutput},
        "Sorry, I can't help with that request. I'm happy to recommend games if you tell me what you enjoy playing."};
    return kDefault;
}

// JSON array of {policy_id, trigger_stages, response_text}.
std::vector<FallbackPolicy> parse_policies(std::string_view json_text);

/// Lowercase terms matched as whole word sequences ("bomb making" matches
/// "Bomb-making guide" but "kill" does not match "skill").
class DenyList {
public:
    DenyList() = default;
    explicit DenyList(std::vector<std::string> terms);
    static DenyList parse(std::string_view content);  // one term per line

    std::optional<std::string> match(std::string_view text) const;
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<std::vector<std::string>> terms_;
    std::vector<std::string> raw_;
};

bool is_refusal(std::string_view response_text);

// Drops each whitespace token independently with probability drop_ratio.
// Order is preserved; if every token would be dropped the first one is kept.
std::string perturb_prompt(std::string_view prompt, double drop_ratio, SeededRng& rng);

// The num_samples perturbed copies ra_llm_check sends, in order.
std::vector<std::string> ra_llm_perturbations(std::string_view prompt, const RaLlmConfig& cfg);

// VERDICT line parser: true = HARMFUL, false = SAFE, nullopt = unparseable.
std::optional<bool> parse_cot_verdict(std::string_view response);
// SAFE/UNSAFE (or False/True) classifier parser; nullopt = unparseable.
std::optional<bool> parse_content_label(std::string_view response);

std::string fallback_response(const SafetyVerdict& verdict, const std::vector<FallbackPolicy>& policies);

/// Input/output safety layer over one safety provider.
class RiskController {
public:
    RiskController(const Gateway& gateway, std::string provider_id, RiskConfig config, DenyList deny_list,
                   const PromptSet& prompts);

    SafetyVerdict ra_llm_check(std::string_view prompt) const;
    SafetyVerdict ra_llm_check(std::string_view prompt, const RaLlmConfig& cfg) const;
    SafetyVerdict cot_intent_check(std::string_view prompt) const;
    SafetyVerdict content_check(std::string_view text, SafetyStage stage) const;

    // content(input) -> RA-LLM -> CoT intent, stopping at the first flag.
    // `seed` is added to the configured RA-LLM seed.
    SafetyVerdict screen_input(std::string_view prompt, std::uint64_t seed = 0) const;
    SafetyVerdict screen_output(std::string_view text) const;

    const RiskConfig& config() const { return config_; }

private:
    const Gateway& gateway_;
    std::string provider_id_;
    RiskConfig config_;
    DenyList deny_;
    const PromptSet& prompts_;
};

}  // namespace matcha
