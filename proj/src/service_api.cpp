#include "matcha/service_api.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "matcha/errors.hpp"
#include "matcha/pipeline.hpp"
#include "matcha/text.hpp"

namespace matcha {

using nlohmann::json;

namespace {

void append_line(const std::filesystem::path& path, const json& line) {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for append");
    out << line.dump() << '\n';
    out.flush();
    if (!out) throw Error("write to " + path.string() + " failed");
}

template <typename F>
void replay(const std::filesystem::path& path, F&& apply) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        auto j = json::parse(line, nullptr, false);
        // A torn final line from a crash is skipped.
        if (j.is_discarded() || !j.is_object()) continue;
        apply(j);
    }
}

HttpReply error_reply(int status, const std::string& message) { return HttpReply{status, json{{"error", message}}}; }

}  // namespace

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// ---- SessionStore ----------------------------------------------------------

SessionStore::SessionStore(std::filesystem::path log_path) : path_(std::move(log_path)), id_rng_(std::random_device{}()) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    replay(path_, [this](const json& j) {
        const auto event = j.value("event", "");
        const auto id = j.value("session_id", "");
        if (id.empty()) return;
        if (event == "session") {
            sessions_[id] = Session{id, j.value("created_at", std::int64_t{0}), {}};
        } else if (event == "turn") {
            auto it = sessions_.find(id);
            if (it == sessions_.end()) return;
            it->second.history.push_back(
                SessionTurn{j.value("query", ""), j.value("rec_ids", std::vector<std::string>{}), j.value("blocked", false)});
        }
    });
}

void SessionStore::write(const json& line) { append_line(path_, line); }

Session SessionStore::create() {
    std::lock_guard lock(mutex_);
    std::string id;
    do {
        std::ostringstream os;
        os << std::hex << id_rng_();
        id = "s" + os.str();
    } while (sessions_.count(id));
    Session s{id, now_ms(), {}};
    write(json{{"event", "session"}, {"session_id", id}, {"created_at", s.created_at}});
    sessions_[id] = s;
    return s;
}

bool SessionStore::exists(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    return sessions_.count(session_id) > 0;
}

std::optional<Session> SessionStore::get(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

void SessionStore::append_turn(const std::string& session_id, SessionTurn turn) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw NotFound(session_id);
    write(json{{"event", "turn"},
               {"session_id", session_id},
               {"query", turn.query},
               {"rec_ids", turn.rec_ids},
               {"blocked", turn.blocked},
               {"at", now_ms()}});
    it->second.history.push_back(std::move(turn));
}

std::size_t SessionStore::size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

// ---- FeedbackStore ---------------------------------------------------------

FeedbackStore::FeedbackStore(std::filesystem::path log_path) : path_(std::move(log_path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    replay(path_, [this](const json& j) {
        FeedbackRecord r;
        r.session_id = j.value("session_id", "");
        r.game_id = j.value("game_id", "");
        r.rating = j.value("rating", 0);
        if (j.contains("comment") && j["comment"].is_string()) r.comment = j["comment"].get<std::string>();
        r.created_at = j.value("created_at", std::int64_t{0});
        records_.push_back(std::move(r));
    });
}

void FeedbackStore::append(const FeedbackRecord& r) {
    std::lock_guard lock(mutex_);
    json line{{"session_id", r.session_id}, {"game_id", r.game_id}, {"rating", r.rating}, {"created_at", r.created_at}};
    if (r.comment) line["comment"] = *r.comment;
    append_line(path_, line);
    records_.push_back(r);
}

std::vector<FeedbackRecord> FeedbackStore::all() const {
    std::lock_guard lock(mutex_);
    return records_;
}

// ---- Service ---------------------------------------------------------------

Service::Service(const std::filesystem::path& state_dir, std::uint64_t seed)
    : sessions_(state_dir / "sessions.log"), feedback_(state_dir / "feedback.log"), seed_(seed) {}

void Service::set_engine(std::shared_ptr<const Engine> engine) {
    std::lock_guard lock(engine_mutex_);
    engine_ = std::move(engine);
}

std::shared_ptr<const Engine> Service::engine() const {
    std::lock_guard lock(engine_mutex_);
    return engine_;
}

HttpReply Service::recommend(const std::string& body) {
    const auto eng = engine();
    if (!eng) return error_reply(503, "catalog not loaded");
    const auto req = json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.is_object()) return error_reply(400, "body must be a JSON object");
    if (!req.contains("query") || !req["query"].is_string() || text::trim(req["query"].get<std::string>()).empty())
        return error_reply(400, "query must be a non-empty string");
    int k = 5;
    if (req.contains("k")) {
        if (!req["k"].is_number_integer()) return error_reply(400, "k must be an integer");
        k = req["k"].get<int>();
    }
    if (k < 1 || k > kMaxK) return error_reply(400, "k must be between 1 and 10");

    std::string session_id;
    if (req.contains("session_id") && !req["session_id"].is_null()) {
        if (!req["session_id"].is_string()) return error_reply(400, "session_id must be a string");
        session_id = req["session_id"].get<std::string>();
        if (!sessions_.exists(session_id)) return error_reply(404, "unknown session");
    }

    const auto query = req["query"].get<std::string>();
    try {
        const auto result = eng->recommend(query, static_cast<std::size_t>(k), seed_ + request_counter_++);
        if (session_id.empty()) session_id = sessions_.create().session_id;

        json out{{"session_id", session_id}, {"recommendations", json::array()}};
        if (result.blocked) {
            out["status"] = "blocked";
            out["blocked_reason"] = result.blocked_reason;
        } else {
            out["status"] = "ok";
            for (const auto& c : result.top) {
                const auto* rec = eng->catalog().get_record(c.game_id);
                if (!rec) continue;
                json entry{{"game_id", c.game_id},
                           {"name", rec->name},
                           {"score", c.fused_score},
                           {"is_exploratory", c.is_exploratory}};
                if (auto it = result.explanations.find(c.game_id); it != result.explanations.end())
                    entry["explanation"] = it->second.summary;
                out["recommendations"].push_back(std::move(entry));
            }
        }
        sessions_.append_turn(session_id, SessionTurn{query, result.blocked ? std::vector<std::string>{} : result.top_ids(),
                                                      result.blocked});
        return HttpReply{200, std::move(out)};
    } catch (const std::exception&) {
        return error_reply(500, "internal error");
    }
}

HttpReply Service::feedback(const std::string& body) {
    const auto req = json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.is_object()) return error_reply(400, "body must be a JSON object");
    if (!req.contains("session_id") || !req["session_id"].is_string()) return error_reply(400, "session_id required");
    const auto session_id = req["session_id"].get<std::string>();
    if (!sessions_.exists(session_id)) return error_reply(404, "unknown session");

    if (!req.contains("game_id") || !req["game_id"].is_string()) return error_reply(422, "game_id required");
    const auto game_id = req["game_id"].get<std::string>();
    if (const auto eng = engine(); eng && !eng->catalog().contains(game_id)) return error_reply(422, "unknown game_id");
    if (!req.contains("rating") || !req["rating"].is_number_integer()) return error_reply(422, "rating must be an integer");
    const int rating = req["rating"].get<int>();
    if (rating < 1 || rating > 5) return error_reply(422, "rating must be between 1 and 5");

    FeedbackRecord rec{session_id, game_id, rating, std::nullopt, now_ms()};
    if (req.contains("comment") && req["comment"].is_string()) rec.comment = req["comment"].get<std::string>();
    try {
        feedback_.append(rec);
    } catch (const std::exception&) {
        return error_reply(500, "internal error");
    }
    return HttpReply{200, json{{"accepted", true}}};
}

HttpReply Service::health() const {
    const auto eng = engine();
    if (!eng) return error_reply(503, "catalog not loaded");
    json providers = json::array();
    for (const auto* pc : eng->gateway().configs())
        providers.push_back({{"id", pc->provider_id}, {"kind", std::string(to_string(pc->kind))}});
    return HttpReply{200, json{{"status", "ok"}, {"catalog_size", eng->catalog().size()}, {"providers", providers}}};
}

HttpReply Service::session(const std::string& session_id) const {
    auto s = sessions_.get(session_id);
    if (!s) return error_reply(404, "unknown session");
    json history = json::array();
    for (const auto& t : s->history)
        history.push_back({{"query", t.query}, {"rec_ids", t.rec_ids}, {"blocked", t.blocked}});
    return HttpReply{200, json{{"session_id", s->session_id}, {"created_at", s->created_at}, {"history", history}}};
}

HttpReply Service::feedback_export() const {
    json rows = json::array();
    for (const auto& r : feedback_.all()) {
        json j{{"session_id", r.session_id}, {"game_id", r.game_id}, {"rating", r.rating}, {"created_at", r.created_at}};
        if (r.comment) j["comment"] = *r.comment;
        rows.push_back(std::move(j));
    }
    return HttpReply{200, json{{"feedback", rows}}};
}

void Service::mount(httplib::Server& server) {
    auto send = [](httplib::Response& res, const HttpReply& reply) {
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json");
    };
    server.Post("/v1/recommend", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, recommend(req.body));
    });
    server.Post("/v1/feedback", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, feedback(req.body));
    });
    server.Get("/v1/feedback", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, feedback_export());
    });
    server.Get("/v1/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
    server.Get(R"(/v1/sessions/([A-Za-z0-9_-]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, session(req.matches[1]));
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        res.status = 500;
        res.set_content(R"({"error":"internal error"})", "application/json");
    });
}

BindAddress parse_bind_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon == 0) throw ConfigError("bind address must be host:port, got " + addr);
    BindAddress b;
    b.host = addr.substr(0, colon);
    try {
        std::size_t used = 0;
        b.port = std::stoi(addr.substr(colon + 1), &used);
        if (used != addr.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ConfigError("bad port in bind address " + addr);
    }
    if (b.port < 0 || b.port > 65535) throw ConfigError("port out of range in " + addr);
    return b;
}

}  // namespace matcha
