#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "matcha/candidate_gen.hpp"
#include "matcha/catalog.hpp"
#include "matcha/config.hpp"
#include "matcha/explain.hpp"
#include "matcha/intent.hpp"
#include "matcha/llm_gateway.hpp"
#include "matcha/prompts.hpp"
#include "matcha/rank_reflect.hpp"
#include "matcha/risk_control.hpp"
#include "matcha/toolbox.hpp"

namespace matcha {

struct PipelineResult {
    bool blocked = false;
    std::optional<SafetyVerdict> verdict;  // the flagging verdict when blocked
    std::string blocked_reason;
    UserIntent intent;
    std::size_t pool_size = 0;
    std::size_t reflection_window = 0;
    bool reflection_applied = false;
    std::vector<RankedCandidate> ranked;  // full post-reflection order
    std::vector<RankedCandidate> top;     // first k of `ranked`
    std::map<std::string, Explanation> explanations;
    std::vector<std::string> notes;

    std::vector<std::string> top_ids() const;
};

// Stage entry counters; a blocked request never advances past screening.
struct PipelineStats {
    std::atomic<std::size_t> requests{0};
    std::atomic<std::size_t> blocked{0};
    std::atomic<std::size_t> candidate_generations{0};
    std::atomic<std::size_t> rankings{0};
    std::atomic<std::size_t> reflections{0};
};

/// The whole recommender: screening, intent, candidates, ranking with
/// reflection, explanations and output screening. Read-only after
/// construction apart from the stats counters.
class Engine {
public:
    Engine(Catalog catalog, std::vector<GenreAlias> aliases, std::shared_ptr<Gateway> gateway, PromptSet prompts,
           std::vector<FallbackPolicy> policies, DenyList deny_list, PipelineSettings settings);

    static std::unique_ptr<Engine> from_config(const EngineConfig& config);

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    const Catalog& catalog() const { return *catalog_; }
    const Toolbox& toolbox() const { return *toolbox_; }
    const Gateway& gateway() const { return *gateway_; }
    Gateway& gateway() { return *gateway_; }
    const PromptSet& prompts() const { return prompts_; }
    const RiskController& risk() const { return *risk_; }
    const PipelineSettings& settings() const { return settings_; }
    const std::vector<FallbackPolicy>& policies() const { return policies_; }
    AgentContext context() const { return AgentContext{*gateway_, *toolbox_, prompts_}; }
    const PipelineStats& stats() const { return stats_; }

    // Throws PreconditionError for an empty query or k == 0.
    PipelineResult recommend(const std::string& query, std::size_t k, std::uint64_t seed) const;

    SafetyVerdict screen(const std::string& query, std::uint64_t seed) const;

private:
    std::unique_ptr<const Catalog> catalog_;
    std::unique_ptr<const Toolbox> toolbox_;
    std::shared_ptr<Gateway> gateway_;
    PromptSet prompts_;
    std::vector<FallbackPolicy> policies_;
    PipelineSettings settings_;
    std::unique_ptr<const RiskController> risk_;
    mutable PipelineStats stats_;
};

// Text handed to the output safety check: names plus explanation summaries.
std::string render_output_for_screening(const PipelineResult& result, const Catalog& catalog);

}  // namespace matcha
