#include "matcha/pipeline.hpp"

#include "matcha/errors.hpp"
#include "matcha/text.hpp"

namespace matcha {

std::vector<std::string> PipelineResult::top_ids() const {
    std::vector<std::string> out;
    out.reserve(top.size());
    for (const auto& c : top) out.push_back(c.game_id);
    return out;
}

Engine::Engine(Catalog catalog, std::vector<GenreAlias> aliases, std::shared_ptr<Gateway> gateway, PromptSet prompts,
               std::vector<FallbackPolicy> policies, DenyList deny_list, PipelineSettings settings)
    : catalog_(std::make_unique<const Catalog>(std::move(catalog))),
      gateway_(std::move(gateway)),
      prompts_(std::move(prompts)),
      policies_(std::move(policies)),
      settings_(std::move(settings)) {
    toolbox_ = std::make_unique<const Toolbox>(*catalog_, std::move(aliases));
    validate(settings_.ranking);
    if (settings_.explanation_quota == 0) throw ConfigError("explanation_quota must be positive");
    for (const auto* id : {&settings_.roles.safety, &settings_.roles.intent, &settings_.roles.reflection,
                           &settings_.roles.explain, &settings_.ranking.provider_ids[0],
                           &settings_.ranking.provider_ids[1]})
        gateway_->provider(*id);
    risk_ = std::make_unique<const RiskController>(*gateway_, settings_.roles.safety, settings_.risk,
                                                   std::move(deny_list), prompts_);
}

std::unique_ptr<Engine> Engine::from_config(const EngineConfig& config) {
    auto catalog = Catalog::load(config.catalog.games, config.catalog.plays, config.catalog.vocab);
    std::vector<GenreAlias> aliases;
    if (config.catalog.aliases) aliases = parse_aliases(read_file(*config.catalog.aliases));

    auto gateway = std::make_shared<Gateway>();
    gateway->set_fan_out(config.fan_out);
    for (const auto& pc : config.providers) {
        auto provider = make_provider(pc);
        if (auto it = config.mock_scripts.find(pc.provider_id); it != config.mock_scripts.end()) {
            auto* mock = dynamic_cast<MockProvider*>(provider.get());
            if (!mock) throw ConfigError("scripts given for non-mock provider " + pc.provider_id);
            load_mock_scripts(*mock, it->second);
        }
        if (auto* mock = dynamic_cast<MockProvider*>(provider.get())) mock->freeze();
        gateway->add(std::move(provider));
    }

    auto prompts = config.prompts_dir ? PromptSet::load_overrides(*config.prompts_dir) : PromptSet();
    std::vector<FallbackPolicy> policies;
    if (config.policies) policies = parse_policies(read_file(*config.policies));
    DenyList deny;
    if (config.deny_keywords) deny = DenyList::parse(read_file(*config.deny_keywords));

    return std::make_unique<Engine>(std::move(catalog), std::move(aliases), std::move(gateway), std::move(prompts),
                                    std::move(policies), std::move(deny), config.pipeline);
}

SafetyVerdict Engine::screen(const std::string& query, std::uint64_t seed) const {
    return risk_->screen_input(query, seed);
}

std::string render_output_for_screening(const PipelineResult& result, const Catalog& catalog) {
    std::vector<std::string> parts;
    for (const auto& c : result.top) {
        std::string line = catalog.get_record(c.game_id)->name;
        if (auto it = result.explanations.find(c.game_id); it != result.explanations.end())
            line += ": " + it->second.summary;
        parts.push_back(std::move(line));
    }
    return text::join(parts, "\n");
}

PipelineResult Engine::recommend(const std::string& query, std::size_t k, std::uint64_t seed) const {
    if (text::trim(query).empty()) throw PreconditionError("query must be non-empty");
    if (k == 0) throw PreconditionError("k must be positive");
    ++stats_.requests;

    PipelineResult out;
    auto block = [&](SafetyVerdict v) {
        out.blocked = true;
        out.blocked_reason = fallback_response(v, policies_);
        out.verdict = std::move(v);
        out.top.clear();
        out.explanations.clear();
        ++stats_.blocked;
    };

    auto verdict = risk_->screen_input(query, seed);
    if (verdict.flagged) {
        block(std::move(verdict));
        return out;
    }

    const auto ctx = context();
    try {
        out.intent = parse_intent(query, *gateway_, settings_.roles.intent, *toolbox_, prompts_);
    } catch (const ProviderFailure& e) {
        out.intent = UserIntent{};
        out.intent.free_text = query;
        out.notes.push_back(std::string("intent extraction failed: ") + e.what());
    }

    ++stats_.candidate_generations;
    auto pool = generate(out.intent, *toolbox_, seed);
    out.pool_size = pool.candidates.size();
    out.notes.insert(out.notes.end(), pool.notes.begin(), pool.notes.end());
    if (pool.candidates.empty()) {
        out.notes.push_back("no admissible candidates");
        return out;
    }

    ++stats_.rankings;
    auto ranking_cfg = settings_.ranking;
    ranking_cfg.exploration_seed += seed;
    auto ranking = rank(pool, out.intent, ranking_cfg, ctx);
    out.notes.insert(out.notes.end(), ranking.notes.begin(), ranking.notes.end());

    ++stats_.reflections;
    auto reflection = reflect(std::move(ranking.items), out.intent, ranking_cfg, settings_.roles.reflection, ctx);
    out.reflection_window = reflection.window;
    out.reflection_applied = reflection.applied;
    out.notes.insert(out.notes.end(), reflection.notes.begin(), reflection.notes.end());
    out.ranked = std::move(reflection.items);
    out.top.assign(out.ranked.begin(), out.ranked.begin() + static_cast<std::ptrdiff_t>(std::min(k, out.ranked.size())));

    out.explanations = explain_top(out.top_ids(), out.intent, settings_.explanation_quota, settings_.roles.explain, ctx);

    auto output_verdict = risk_->screen_output(render_output_for_screening(out, *catalog_));
    if (output_verdict.flagged) block(std::move(output_verdict));
    return out;
}

}  // namespace matcha
