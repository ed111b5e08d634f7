// matcha: operator entry points (serve, eval, ingest, attack-demo).
// Exit codes: 0 success, 1 validation failure, 2 usage or IO error.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "matcha/catalog.hpp"
#include "matcha/config.hpp"
#include "matcha/errors.hpp"
#include "matcha/eval_harness.hpp"
#include "matcha/pipeline.hpp"
#include "matcha/service_api.hpp"
#include "matcha/text.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kUsage = 2;

httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

std::vector<std::size_t> parse_k_list(const std::string& s) {
    std::vector<std::size_t> ks;
    for (const auto& part : matcha::text::split_list(s, ',')) {
        std::size_t used = 0;
        long v = std::stol(part, &used);
        if (used != part.size() || v <= 0) throw std::invalid_argument("bad k value: " + part);
        ks.push_back(static_cast<std::size_t>(v));
    }
    if (ks.empty()) throw std::invalid_argument("empty --k list");
    return ks;
}

std::unique_ptr<matcha::Engine> build_engine(const matcha::EngineConfig& cfg, std::uint64_t seed) {
    auto c = cfg;
    c.seed = seed;
    return matcha::Engine::from_config(c);
}

int run_serve(const std::string& config_path, std::string bind, std::uint64_t seed, bool seed_set) {
    auto cfg = matcha::load_config(config_path);
    if (!seed_set) seed = cfg.seed;
    if (bind.empty()) {
        if (const char* env = std::getenv("MATCHA_BIND_ADDR")) bind = env;
    }
    if (bind.empty()) bind = cfg.bind_addr;
    const auto addr = matcha::parse_bind_addr(bind);

    std::shared_ptr<const matcha::Engine> engine = build_engine(cfg, seed);
    matcha::Service service(cfg.state_dir, seed);
    service.set_engine(engine);

    httplib::Server server;
    service.mount(server);
    if (!server.bind_to_port(addr.host, addr.port)) {
        std::cerr << "error: cannot bind " << bind << " (address in use or not permitted)\n";
        return kUsage;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << addr.host << ":" << addr.port << std::endl;
    server.listen_after_bind();
    g_server = nullptr;
    return kOk;
}

std::optional<matcha::JailbreakReport> suite(const std::optional<std::string>& path, const matcha::Engine& engine,
                                             std::uint64_t seed) {
    if (!path) return std::nullopt;
    const auto prompts = matcha::parse_prompt_lines(matcha::read_file(*path));
    return matcha::jailbreak_prevention_rate(
        prompts, [&](const std::string& p) { return engine.screen(p, seed); });
}

int run_eval(const std::string& corpus_path, const std::string& config_path, const std::string& k_list,
             const std::string& out_path, const std::string& system, const std::optional<std::string>& adversarial,
             const std::optional<std::string>& benign, std::uint64_t seed, bool seed_set) {
    std::vector<std::size_t> ks;
    try {
        ks = parse_k_list(k_list);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    const auto corpus = matcha::parse_corpus(matcha::read_file(corpus_path));
    auto cfg = matcha::load_config(config_path);
    if (!seed_set) seed = cfg.seed;
    auto engine = build_engine(cfg, seed);

    matcha::EvalOptions options;
    options.k_values = ks;
    options.seed = seed;
    matcha::Recommender recommender;
    if (system == "pop") {
        recommender = matcha::pop_recommender(engine->catalog());
    } else {
        recommender = matcha::engine_recommender(*engine);
        if (const auto& judge = engine->settings().roles.judge) {
            const auto ctx = engine->context();
            const std::string provider = *judge;
            options.judge = [ctx, provider](const std::string& q, const std::string& id, const std::string& text) {
                return matcha::judge_explanation(q, id, text, provider, ctx);
            };
        }
    }
    auto reports = matcha::run_eval(corpus, recommender, engine->catalog(), options);

    if (system != "pop") {
        const auto adv = suite(adversarial, *engine, seed);
        const auto ben = suite(benign, *engine, seed);
        for (auto& r : reports) {
            if (adv) r.jp_rate = adv->rate;
            if (ben) r.false_block_rate = ben->rate;
        }
    }

    nlohmann::json doc;
    doc["system"] = system;
    doc["seed"] = seed;
    doc["reports"] = nlohmann::json::array();
    for (const auto& r : reports) doc["reports"].push_back(matcha::to_json(r));
    const auto table = matcha::format_table(reports);
    doc["table"] = table;

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kUsage;
    }
    out << doc.dump(2) << '\n';
    std::ofstream txt(out_path + ".txt", std::ios::binary);
    txt << table;
    std::cout << table;
    return kOk;
}

int run_ingest(const std::string& games, const std::optional<std::string>& plays, const std::string& vocab,
               bool check) {
    try {
        const auto catalog = matcha::Catalog::load(games, plays ? std::optional<std::filesystem::path>(*plays)
                                                               : std::nullopt,
                                                   vocab);
        std::cout << "games: " << catalog.size() << "\n"
                  << "play_events: " << catalog.play_events().size() << "\n"
                  << "genres: " << catalog.vocabulary().genres().size() << "\n";
        return kOk;
    } catch (const matcha::ConfigError&) {
        throw;
    } catch (const matcha::Error& e) {
        std::cerr << (check ? "violation: " : "error: ") << e.what() << "\n";
        return kValidation;
    }
}

int run_attack_demo(const std::string& prompts_path, const std::string& config_path,
                    const std::optional<std::string>& benign, std::uint64_t seed, bool seed_set) {
    const auto prompts = matcha::parse_prompt_lines(matcha::read_file(prompts_path));
    auto cfg = matcha::load_config(config_path);
    if (!seed_set) seed = cfg.seed;
    auto engine = build_engine(cfg, seed);
    const auto screen = [&](const std::string& p) { return engine->screen(p, seed); };

    const auto report = matcha::jailbreak_prevention_rate(prompts, screen);
    for (const auto& v : report.verdicts) {
        std::cout << (v.verdict.flagged ? "BLOCKED " : "allowed ") << std::setw(14) << std::left
                  << matcha::to_string(v.verdict.stage) << " " << v.prompt << "\n";
    }
    std::cout << std::fixed << std::setprecision(4) << "prevention_rate: " << report.rate << " (" << report.blocked
              << "/" << report.total << ")\n";
    if (benign) {
        const auto b = matcha::jailbreak_prevention_rate(matcha::parse_prompt_lines(matcha::read_file(*benign)), screen);
        std::cout << "false_block_rate: " << b.rate << " (" << b.blocked << "/" << b.total << ")\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matcha game recommender"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for every seeded component");

    std::string config_path, bind, corpus_path, out_path, k_list = "5,10", system = "matcha";
    std::string games_path, vocab_path, prompts_path;
    std::optional<std::string> plays_path, adversarial_path, benign_path;
    bool check = false;

    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    serve->add_option("--config", config_path)->required();
    serve->add_option("--bind", bind, "host:port (overrides MATCHA_BIND_ADDR and config)");

    auto* eval = app.add_subcommand("eval", "Run the offline evaluation");
    eval->add_option("--corpus", corpus_path)->required();
    eval->add_option("--config", config_path)->required();
    eval->add_option("--k", k_list, "Comma separated cutoffs");
    eval->add_option("--out", out_path)->required();
    eval->add_option("--system", system)->check(CLI::IsMember({"matcha", "pop"}));
    eval->add_option("--adversarial", adversarial_path);
    eval->add_option("--benign", benign_path);

    auto* ingest = app.add_subcommand("ingest", "Validate catalog files");
    ingest->add_option("--games", games_path)->required();
    ingest->add_option("--plays", plays_path);
    ingest->add_option("--vocab", vocab_path)->required();
    ingest->add_flag("--check", check, "Exit nonzero on any violation");

    auto* attack = app.add_subcommand("attack-demo", "Run a prompt suite through input screening");
    attack->add_option("--prompts", prompts_path)->required();
    attack->add_option("--config", config_path)->required();
    attack->add_option("--benign", benign_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    const bool seed_set = seed_opt->count() > 0;

    try {
        if (*serve) return run_serve(config_path, bind, seed, seed_set);
        if (*eval)
            return run_eval(corpus_path, config_path, k_list, out_path, system, adversarial_path, benign_path, seed,
                            seed_set);
        if (*ingest) return run_ingest(games_path, plays_path, vocab_path, check);
        if (*attack) return run_attack_demo(prompts_path, config_path, benign_path, seed, seed_set);
    } catch (const matcha::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const matcha::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
