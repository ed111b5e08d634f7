#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "matcha/llm_gateway.hpp"
#include "matcha/rank_reflect.hpp"
#include "matcha/risk_control.hpp"

namespace matcha {

struct CatalogPaths {
    std::filesystem::path games;
    std::optional<std::filesystem::path> plays;
    std::filesystem::path vocab;
    std::optional<std::filesystem::path> aliases;
};

// Which provider plays which agent role.
struct ProviderRoles {
    std::string safety;
    std::string intent;
    std::string reflection;
    std::string explain;
    std::optional<std::string> judge;
};

struct PipelineSettings {
    ProviderRoles roles;
    RankingConfig ranking;
    RiskConfig risk;
    std::size_t explanation_quota = 5;
};

struct EngineConfig {
    CatalogPaths catalog;
    std::vector<ProviderConfig> providers;
    std::map<std::string, std::filesystem::path> mock_scripts;  // provider id -> script file
    PipelineSettings pipeline;
    std::optional<std::filesystem::path> policies;
    std::optional<std::filesystem::path> deny_keywords;
    std::optional<std::filesystem::path> prompts_dir;
    std::filesystem::path state_dir = "state";
    std::string bind_addr = "127.0.0.1:8080";
    std::uint64_t seed = 0;
    FanOut fan_out = FanOut::Parallel;
};

/// Reads the JSON config document. Relative paths resolve against the
/// config file's directory. Throws ConfigError.
EngineConfig load_config(const std::filesystem::path& path);
EngineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);

// Mock script file: one JSON object per line
// {key, response, latency_ms?, error_status?, timeout?}.
void load_mock_scripts(MockProvider& mock, const std::filesystem::path& path);
void load_mock_scripts_text(MockProvider& mock, std::string_view content);

}  // namespace matcha
