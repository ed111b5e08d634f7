#include "matcha/llm_gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <future>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "matcha/errors.hpp"
#include "matcha/text.hpp"

namespace matcha {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

void sleep_ms(int ms) {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

}  // namespace

std::string_view to_string(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

std::string_view to_string(ProviderKind k) { return k == ProviderKind::Remote ? "remote" : "mock"; }

void validate(const ChatRequest& request) {
    if (request.messages.empty()) throw PreconditionError("chat request has no messages");
    for (const auto& m : request.messages)
        if (m.role == Role::User && m.content.empty()) throw PreconditionError("empty user message");
    if (request.temperature < 0.0 || request.temperature > 1.0)
        throw PreconditionError("temperature must be in [0,1]");
    if (request.max_tokens <= 0) throw PreconditionError("max_tokens must be positive");
}

std::string fingerprint(const ChatRequest& request) {
    std::string first_line;
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role != Role::User) continue;
        const auto nl = it->content.find('\n');
        first_line = text::trim(it->content.substr(0, nl));
        break;
    }
    return request.agent_tag + ":" + first_line;
}

ChatRequest make_request(std::string provider_id, std::string agent_tag, std::string user_content,
                         std::string system_content) {
    ChatRequest req;
    req.provider_id = std::move(provider_id);
    req.agent_tag = std::move(agent_tag);
    if (!system_content.empty()) req.messages.push_back({Role::System, std::move(system_content)});
    req.messages.push_back({Role::User, std::move(user_content)});
    return req;
}

void validate(const ProviderConfig& config) {
    if (config.provider_id.empty()) throw ConfigError("provider with empty id");
    if (config.kind == ProviderKind::Remote && (!config.endpoint || config.endpoint->empty()))
        throw ConfigError("remote provider " + config.provider_id + " requires an endpoint");
    if (config.timeout_ms <= 0) throw ConfigError("timeout_ms must be positive for " + config.provider_id);
    if (config.max_retries < 0) throw ConfigError("max_retries must be non-negative for " + config.provider_id);
}

void apply_env_overrides(ProviderConfig& config) {
    const auto prefix = "MATCHA_PROVIDER_" + text::to_upper(config.provider_id);
    if (const char* ep = std::getenv((prefix + "_ENDPOINT").c_str()); ep && *ep) config.endpoint = ep;
    if (const char* t = std::getenv((prefix + "_TIMEOUT_MS").c_str()); t && *t) {
        try {
            config.timeout_ms = std::stoi(t);
        } catch (const std::exception&) {
            throw ConfigError(prefix + "_TIMEOUT_MS is not an integer");
        }
    }
}

// ---- MockProvider ----------------------------------------------------------

MockProvider::MockProvider(std::string provider_id) : MockProvider([&] {
    ProviderConfig c;
    c.provider_id = std::move(provider_id);
    return c;
}()) {}

MockProvider::MockProvider(ProviderConfig config) : config_(std::move(config)) {
    config_.kind = ProviderKind::Mock;
}

void MockProvider::put(const std::string& key, Script script) {
    if (frozen_) throw PreconditionError("mock provider " + config_.provider_id + " is frozen");
    if (const auto pos = key.find(":~"); pos != std::string::npos) {
        auto words = text::word_tokens(key.substr(pos + 2));
        if (words.empty()) throw PreconditionError("keyword script needs at least one word: " + key);
        keyword_rules_.push_back(KeywordRule{key.substr(0, pos), std::move(words), std::move(script)});
    } else if (!key.empty() && key.back() == '*')
        prefixes_[key.substr(0, key.size() - 1)] = std::move(script);
    else
        exact_[key] = std::move(script);
}

void MockProvider::register_script(const std::string& key, std::string response, int latency_ms) {
    put(key, Script{std::move(response), latency_ms, std::nullopt, false});
}

void MockProvider::register_error(const std::string& key, int status, std::string body, int latency_ms) {
    put(key, Script{std::move(body), latency_ms, status, false});
}

void MockProvider::register_timeout(const std::string& key, int latency_ms) {
    put(key, Script{{}, latency_ms, std::nullopt, true});
}

const MockProvider::Script* MockProvider::find(const std::string& fp) const {
    if (auto it = exact_.find(fp); it != exact_.end()) return &it->second;
    if (!keyword_rules_.empty()) {
        const auto colon = fp.find(':');
        const auto tag = fp.substr(0, colon);
        const auto words = text::word_tokens(colon == std::string::npos ? std::string() : fp.substr(colon + 1));
        for (const auto& rule : keyword_rules_) {
            if (rule.tag != tag) continue;
            if (std::search(words.begin(), words.end(), rule.words.begin(), rule.words.end()) != words.end())
                return &rule.script;
        }
    }
    const Script* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& [prefix, script] : prefixes_) {
        if (fp.compare(0, prefix.size(), prefix) == 0 && (!best || prefix.size() >= best_len)) {
            best = &script;
            best_len = prefix.size();
        }
    }
    return best;
}

ChatResponse MockProvider::complete(const ChatRequest& request) {
    validate(request);
    frozen_ = true;
    const auto start = Clock::now();
    const auto fp = fingerprint(request);
    {
        std::lock_guard lock(log_mutex_);
        log_.push_back(fp);
    }
    const Script* script = find(fp);
    if (!script) throw NoScript(fp);
    sleep_ms(script->latency_ms);
    if (script->timeout) throw Timeout(config_.provider_id, 1);
    if (script->error_status) throw ProviderError(*script->error_status, script->response);
    return ChatResponse{script->response, request.provider_id.empty() ? config_.provider_id : request.provider_id,
                        elapsed_ms(start)};
}

std::size_t MockProvider::call_count() const {
    std::lock_guard lock(log_mutex_);
    return log_.size();
}

std::size_t MockProvider::call_count(std::string_view prefix) const {
    std::lock_guard lock(log_mutex_);
    std::size_t n = 0;
    for (const auto& fp : log_)
        if (std::string_view(fp).substr(0, prefix.size()) == prefix) ++n;
    return n;
}

std::vector<std::string> MockProvider::call_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

// ---- RemoteProvider --------------------------------------------------------

RemoteProvider::RemoteProvider(ProviderConfig config) : config_(std::move(config)) {
    config_.kind = ProviderKind::Remote;
    validate(config_);
    const std::string& url = *config_.endpoint;
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) {
        base_ = url;
        path_ = "/";
    } else {
        base_ = url.substr(0, path_start);
        path_ = url.substr(path_start);
    }
}

std::string RemoteProvider::request_body(const ChatRequest& request) const {
    nlohmann::json body;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
        body["messages"].push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    if (request.seed) body["seed"] = *request.seed;
    return body.dump();
}

ChatResponse RemoteProvider::complete(const ChatRequest& request) {
    validate(request);
    const auto start = Clock::now();
    const auto body = request_body(request);
    const int attempts = 1 + config_.max_retries;
    std::optional<ProviderError> last_error;

    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) sleep_ms(config_.backoff_ms);
        httplib::Client client(base_);
        const auto sec = config_.timeout_ms / 1000;
        const auto usec = (config_.timeout_ms % 1000) * 1000;
        client.set_connection_timeout(sec, usec);
        client.set_read_timeout(sec, usec);
        client.set_write_timeout(sec, usec);

        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            last_error.reset();
            continue;
        }
        if (res->status >= 500) {
            last_error.emplace(res->status, res->body);
            continue;
        }
        if (res->status < 200 || res->status >= 300) throw ProviderError(res->status, res->body);

        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("content") ||
            !parsed["content"].is_string())
            throw ProviderError(res->status, "malformed response body");
        return ChatResponse{parsed["content"].get<std::string>(), config_.provider_id, elapsed_ms(start)};
    }
    if (last_error) throw *last_error;
    throw Timeout(config_.provider_id, attempts);
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& config) {
    validate(config);
    if (config.kind == ProviderKind::Remote) return std::make_shared<RemoteProvider>(config);
    return std::make_shared<MockProvider>(config);
}

// ---- Gateway ---------------------------------------------------------------

void Gateway::add(std::shared_ptr<Provider> provider) {
    const auto& id = provider->config().provider_id;
    if (!providers_.emplace(id, std::move(provider)).second) throw ConfigError("duplicate provider id " + id);
}

bool Gateway::has(std::string_view provider_id) const { return providers_.find(provider_id) != providers_.end(); }

Provider& Gateway::provider(std::string_view provider_id) const {
    auto it = providers_.find(provider_id);
    if (it == providers_.end()) throw ConfigError("unknown provider " + std::string(provider_id));
    return *it->second;
}

std::vector<const ProviderConfig*> Gateway::configs() const {
    std::vector<const ProviderConfig*> out;
    for (const auto& [id, p] : providers_) out.push_back(&p->config());
    return out;
}

ChatResponse Gateway::complete(const ChatRequest& request) const {
    return provider(request.provider_id).complete(request);
}

CallResult capture(const std::function<ChatResponse()>& call) {
    CallResult r;
    try {
        r.response = call();
    } catch (const std::exception& e) {
        r.error = std::current_exception();
        r.error_message = e.what();
    }
    return r;
}

std::vector<CallResult> Gateway::complete_parallel(const std::vector<ChatRequest>& requests) const {
    std::vector<CallResult> out;
    out.reserve(requests.size());
    if (fan_out_ == FanOut::Sequential || requests.size() == 1) {
        for (const auto& req : requests) out.push_back(capture([&] { return complete(req); }));
        return out;
    }
    std::vector<std::future<CallResult>> futures;
    futures.reserve(requests.size());
    for (const auto& req : requests)
        futures.push_back(std::async(std::launch::async, [this, &req] { return capture([&] { return complete(req); }); }));
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

}  // namespace matcha
