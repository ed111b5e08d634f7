#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace matcha {

enum class Role { System, User, Assistant };

std::string_view to_string(Role r);

struct ChatMessage {
    Role role = Role::User;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::string provider_id;
    // Routing tag of the calling agent ("rank", "intent", "judge", ...). Forms
    // the prefix of the mock fingerprint; not sent over the wire.
    std::string agent_tag;
    double temperature = 0.0;
    int max_tokens = 512;
    std::optional<std::uint64_t> seed;
};

// Throws PreconditionError on an invalid request.
void validate(const ChatRequest& request);

// "<agent_tag>:<first line of the last user message>".
std::string fingerprint(const ChatRequest& request);

ChatRequest make_request(std::string provider_id, std::string agent_tag, std::string user_content,
                         std::string system_content = {});

struct ChatResponse {
    std::string content;
    std::string provider_id;
    std::int64_t latency_ms = 0;
};

enum class ProviderKind { Remote, Mock };

std::string_view to_string(ProviderKind k);

struct ProviderConfig {
    std::string provider_id;
    ProviderKind kind = ProviderKind::Mock;
    std::optional<std::string> endpoint;
    int timeout_ms = 10000;
    int max_retries = 2;
    int backoff_ms = 250;
};

// Throws ConfigError when the config is unusable (e.g. remote without endpoint).
void validate(const ProviderConfig& config);

// Applies MATCHA_PROVIDER_<ID>_ENDPOINT and MATCHA_PROVIDER_<ID>_TIMEOUT_MS.
void apply_env_overrides(ProviderConfig& config);

class Provider {
public:
    virtual ~Provider() = default;
    virtual const ProviderConfig& config() const = 0;
    // Safe to call concurrently.
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// Scripted provider keyed on the request fingerprint. The script table is
/// frozen by the first completion: registering afterwards throws.
class MockProvider : public Provider {
public:
    explicit MockProvider(std::string provider_id);
    explicit MockProvider(ProviderConfig config);

    const ProviderConfig& config() const override { return config_; }
    ChatResponse complete(const ChatRequest& request) override;

    // Keys: exact fingerprint; "prefix*" (longest prefix wins); "tag:~words"
    // (first line contains the word sequence, first registered rule wins).
    // Lookup order is exact, then keyword rules, then prefixes.
    void register_script(const std::string& key, std::string response, int latency_ms = 0);
    // Scripted failures: an HTTP-style error or a timeout.
    void register_error(const std::string& key, int status, std::string body = "scripted failure", int latency_ms = 0);
    void register_timeout(const std::string& key, int latency_ms = 0);

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    std::size_t call_count() const;
    // Calls whose fingerprint starts with `prefix`.
    std::size_t call_count(std::string_view prefix) const;
    std::vector<std::string> call_log() const;

private:
    struct Script {
        std::string response;
        int latency_ms = 0;
        std::optional<int> error_status;
        bool timeout = false;
    };

    const Script* find(const std::string& fp) const;
    void put(const std::string& key, Script script);

    ProviderConfig config_;
    std::map<std::string, Script> exact_;
    std::map<std::string, Script> prefixes_;
    struct KeywordRule {
        std::string tag;
        std::vector<std::string> words;  // lowercased word sequence
        Script script;
    };
    std::vector<KeywordRule> keyword_rules_;  // registration order
    std::atomic<bool> frozen_{false};
    mutable std::mutex log_mutex_;
    std::vector<std::string> log_;
};

/// HTTP POST provider speaking the flat {messages, temperature, max_tokens, seed}
/// -> {content} convention.
class RemoteProvider : public Provider {
public:
    explicit RemoteProvider(ProviderConfig config);

    const ProviderConfig& config() const override { return config_; }
    ChatResponse complete(const ChatRequest& request) override;

    std::string request_body(const ChatRequest& request) const;

private:
    ProviderConfig config_;
    std::string base_;
    std::string path_;
};

std::shared_ptr<Provider> make_provider(const ProviderConfig& config);

struct CallResult {
    std::optional<ChatResponse> response;
    std::exception_ptr error;
    std::string error_message;

    bool ok() const { return response.has_value(); }
};

enum class FanOut { Parallel, Sequential };

/// Registry of providers by id plus the fan-out primitive used for
/// concurrent provider calls.
class Gateway {
public:
    Gateway() = default;

    void add(std::shared_ptr<Provider> provider);
    bool has(std::string_view provider_id) const;
    Provider& provider(std::string_view provider_id) const;  // throws ConfigError
    std::vector<const ProviderConfig*> configs() const;

    ChatResponse complete(const ChatRequest& request) const;

    // Results are positionally aligned with `requests`; a failing call never
    // cancels its siblings.
    std::vector<CallResult> complete_parallel(const std::vector<ChatRequest>& requests) const;

    void set_fan_out(FanOut mode) { fan_out_ = mode; }
    FanOut fan_out() const { return fan_out_; }

private:
    std::map<std::string, std::shared_ptr<Provider>, std::less<>> providers_;
    FanOut fan_out_ = FanOut::Parallel;
};

CallResult capture(const std::function<ChatResponse()>& call);

}  // namespace matcha
