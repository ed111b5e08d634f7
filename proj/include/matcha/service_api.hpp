#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace matcha {

class Engine;

struct SessionTurn {
    std::string query;
    std::vector<std::string> rec_ids;
    bool blocked = false;
};

struct Session {
    std::string session_id;
    std::int64_t created_at = 0;  // unix epoch milliseconds
    std::vector<SessionTurn> history;
};

struct FeedbackRecord {
    std::string session_id;
    std::string game_id;
    int rating = 0;
    std::optional<std::string> comment;
    std::int64_t created_at = 0;
};

std::int64_t now_ms();

/// Append-only, file-backed session store (sessions.log). Every write is
/// flushed before returning; the constructor replays the log.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path log_path);

    Session create();
    bool exists(const std::string& session_id) const;
    std::optional<Session> get(const std::string& session_id) const;
    void append_turn(const std::string& session_id, SessionTurn turn);  // throws NotFound
    std::size_t size() const;

private:
    void write(const nlohmann::json& line);

    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::map<std::string, Session> sessions_;
    std::mt19937_64 id_rng_;
};

class FeedbackStore {
public:
    explicit FeedbackStore(std::filesystem::path log_path);

    void append(const FeedbackRecord& record);
    std::vector<FeedbackRecord> all() const;

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::vector<FeedbackRecord> records_;
};

struct HttpReply {
    int status = 200;
    nlohmann::json body;
};

/// HTTP front door. Handlers are plain functions over request bodies so they
/// can be exercised without a socket; mount() wires them into cpp-httplib.
class Service {
public:
    static constexpr int kMaxK = 10;

    Service(const std::filesystem::path& state_dir, std::uint64_t seed = 0);

    // Until an engine is attached, health answers 503 and recommend 503.
    void set_engine(std::shared_ptr<const Engine> engine);

    HttpReply recommend(const std::string& body);
    HttpReply feedback(const std::string& body);
    HttpReply health() const;
    HttpReply session(const std::string& session_id) const;
    HttpReply feedback_export() const;

    void mount(httplib::Server& server);

    const SessionStore& sessions() const { return sessions_; }
    const FeedbackStore& feedback_store() const { return feedback_; }

private:
    std::shared_ptr<const Engine> engine() const;

    mutable std::mutex engine_mutex_;
    std::shared_ptr<const Engine> engine_;
    SessionStore sessions_;
    FeedbackStore feedback_;
    std::uint64_t seed_;
    std::atomic<std::uint64_t> request_counter_{0};
};

struct BindAddress {
    std::string host;
    int port = 0;
};

// "host:port"; throws ConfigError.
BindAddress parse_bind_addr(const std::string& addr);

}  // namespace matcha
