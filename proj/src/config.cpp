#include "matcha/config.hpp"

#include <json.hpp>

#include "matcha/catalog.hpp"
#include "matcha/errors.hpp"
#include "matcha/text.hpp"

namespace matcha {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

std::string required(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_string() || obj.at(key).get<std::string>().empty())
        throw ConfigError("config is missing " + where + "." + key);
    return obj.at(key).get<std::string>();
}

template <std::size_t N>
std::array<double, N> weights(const json& obj, const char* key, std::array<double, N> fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& arr = obj.at(key);
    if (!arr.is_array() || arr.size() != N)
        throw ConfigError(std::string("ranking.") + key + " must have " + std::to_string(N) + " entries");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!arr[i].is_number()) throw ConfigError(std::string("ranking.") + key + " must be numeric");
        out[i] = arr[i].get<double>();
    }
    return out;
}

}  // namespace

EngineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    const auto doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ConfigError("config is not a JSON object");

    EngineConfig cfg;
    if (!doc.contains("catalog") || !doc["catalog"].is_object()) throw ConfigError("config is missing catalog");
    const auto& cat = doc["catalog"];
    cfg.catalog.games = resolve(base_dir, required(cat, "games", "catalog"));
    cfg.catalog.vocab = resolve(base_dir, required(cat, "vocab", "catalog"));
    if (cat.contains("plays")) cfg.catalog.plays = resolve(base_dir, required(cat, "plays", "catalog"));
    if (cat.contains("aliases")) cfg.catalog.aliases = resolve(base_dir, required(cat, "aliases", "catalog"));

    for (const auto& p : doc.value("providers", json::array())) {
        ProviderConfig pc;
        pc.provider_id = required(p, "id", "providers[]");
        const auto kind = get_or<std::string>(p, "kind", "mock");
        if (kind == "mock")
            pc.kind = ProviderKind::Mock;
        else if (kind == "remote")
            pc.kind = ProviderKind::Remote;
        else
            throw ConfigError("provider " + pc.provider_id + " has unknown kind '" + kind + "'");
        if (p.contains("endpoint")) pc.endpoint = required(p, "endpoint", "providers[]");
        pc.timeout_ms = get_or<int>(p, "timeout_ms", pc.timeout_ms);
        pc.max_retries = get_or<int>(p, "max_retries", pc.max_retries);
        pc.backoff_ms = get_or<int>(p, "backoff_ms", pc.backoff_ms);
        apply_env_overrides(pc);
        validate(pc);
        if (p.contains("scripts")) cfg.mock_scripts[pc.provider_id] = resolve(base_dir, required(p, "scripts", "providers[]"));
        cfg.providers.push_back(std::move(pc));
    }
    if (cfg.providers.empty()) throw ConfigError("config declares no providers");

    const auto roles = doc.value("roles", json::object());
    auto& r = cfg.pipeline.roles;
    r.safety = required(roles, "safety", "roles");
    r.intent = required(roles, "intent", "roles");
    r.reflection = required(roles, "reflection", "roles");
    r.explain = required(roles, "explain", "roles");
    if (roles.contains("judge")) r.judge = required(roles, "judge", "roles");
    if (!roles.contains("ranking") || !roles["ranking"].is_array() || roles["ranking"].size() != 2)
        throw ConfigError("roles.ranking must list exactly two provider ids");

    auto& rk = cfg.pipeline.ranking;
    for (std::size_t i = 0; i < 2; ++i) {
        if (!roles["ranking"][i].is_string()) throw ConfigError("roles.ranking entries must be strings");
        rk.provider_ids[i] = roles["ranking"][i].get<std::string>();
    }
    const auto ranking = doc.value("ranking", json::object());
    rk.provider_weights = weights<2>(ranking, "provider_weights", rk.provider_weights);
    rk.dimension_weights = weights<kNumDimensions>(ranking, "dimension_weights", rk.dimension_weights);
    rk.exploration_rate = get_or<double>(ranking, "exploration_rate", rk.exploration_rate);
    rk.exploration_seed = get_or<std::uint64_t>(ranking, "exploration_seed", rk.exploration_seed);
    rk.reflection_depth = get_or<std::size_t>(ranking, "reflection_depth", rk.reflection_depth);
    validate(rk);

    const auto risk = doc.value("risk", json::object());
    auto& rc = cfg.pipeline.risk;
    rc.enable_ra_llm = get_or<bool>(risk, "enable_ra_llm", rc.enable_ra_llm);
    rc.enable_cot = get_or<bool>(risk, "enable_cot", rc.enable_cot);
    rc.cot_few_shot = get_or<bool>(risk, "cot_few_shot", rc.cot_few_shot);
    const auto ra = risk.value("ra_llm", json::object());
    rc.ra_llm.num_samples = get_or<int>(ra, "num_samples", rc.ra_llm.num_samples);
    rc.ra_llm.drop_ratio = get_or<double>(ra, "drop_ratio", rc.ra_llm.drop_ratio);
    rc.ra_llm.refusal_threshold = get_or<double>(ra, "refusal_threshold", rc.ra_llm.refusal_threshold);
    rc.ra_llm.rng_seed = get_or<std::uint64_t>(ra, "rng_seed", rc.ra_llm.rng_seed);
    validate(rc.ra_llm);

    cfg.pipeline.explanation_quota = get_or<std::size_t>(doc, "explanation_quota", cfg.pipeline.explanation_quota);
    if (cfg.pipeline.explanation_quota == 0) throw ConfigError("explanation_quota must be positive");

    if (doc.contains("policies")) cfg.policies = resolve(base_dir, required(doc, "policies", "config"));
    if (doc.contains("deny_keywords")) cfg.deny_keywords = resolve(base_dir, required(doc, "deny_keywords", "config"));
    if (doc.contains("prompts_dir")) cfg.prompts_dir = resolve(base_dir, required(doc, "prompts_dir", "config"));
    if (doc.contains("state_dir")) cfg.state_dir = resolve(base_dir, required(doc, "state_dir", "config"));
    cfg.bind_addr = get_or<std::string>(doc, "bind_addr", cfg.bind_addr);
    cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
    const auto fan_out = get_or<std::string>(doc, "fan_out", "parallel");
    if (fan_out == "parallel")
        cfg.fan_out = FanOut::Parallel;
    else if (fan_out == "sequential")
        cfg.fan_out = FanOut::Sequential;
    else
        throw ConfigError("fan_out must be 'parallel' or 'sequential'");

    auto known = [&](const std::string& id) {
        for (const auto& p : cfg.providers)
            if (p.provider_id == id) return true;
        return false;
    };
    for (const auto* id : {&r.safety, &r.intent, &r.reflection, &r.explain, &rk.provider_ids[0], &rk.provider_ids[1]})
        if (!known(*id)) throw ConfigError("role refers to unknown provider " + *id);
    if (r.judge && !known(*r.judge)) throw ConfigError("role refers to unknown provider " + *r.judge);
    return cfg;
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::string content;
    try {
        content = read_file(path);
    } catch (const Error&) {
        throw ConfigError("cannot read config " + path.string());
    }
    return parse_config(content, path.parent_path());
}

void load_mock_scripts_text(MockProvider& mock, std::string_view content) {
    auto ls = text::lines(content);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (text::trim(ls[i]).empty()) continue;
        const auto obj = json::parse(ls[i], nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("key") || !obj["key"].is_string())
            throw ParseError(i + 1, "mock script line needs a string 'key'");
        const auto key = obj["key"].get<std::string>();
        const int latency = obj.value("latency_ms", 0);
        if (obj.value("timeout", false))
            mock.register_timeout(key, latency);
        else if (obj.contains("error_status"))
            mock.register_error(key, obj["error_status"].get<int>(), obj.value("response", "scripted failure"), latency);
        else
            mock.register_script(key, obj.value("response", ""), latency);
    }
}

void load_mock_scripts(MockProvider& mock, const std::filesystem::path& path) {
    load_mock_scripts_text(mock, read_file(path));
}

}  // namespace matcha
