#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "matcha/config.hpp"
#include "matcha/errors.hpp"
#include "matcha/eval_harness.hpp"
#include "matcha/metrics.hpp"
#include "matcha/pipeline.hpp"

namespace py = pybind11;
using namespace matcha;
using nlohmann::json;

namespace {

// Results cross the boundary as JSON text; the Python layer decodes them.
json result_json(const PipelineResult& r, const Catalog& catalog) {
    json out{{"blocked", r.blocked}, {"pool_size", r.pool_size}, {"reflection_window", r.reflection_window},
             {"notes", r.notes}, {"recommendations", json::array()}};
    if (r.blocked) out["blocked_reason"] = r.blocked_reason;
    for (const auto& c : r.top) {
        json e{{"game_id", c.game_id},
               {"name", catalog.get_record(c.game_id)->name},
               {"score", c.fused_score},
               {"is_exploratory", c.is_exploratory}};
        if (auto it = r.explanations.find(c.game_id); it != r.explanations.end()) e["explanation"] = it->second.summary;
        out["recommendations"].push_back(std::move(e));
    }
    return out;
}

json verdict_json(const SafetyVerdict& v) {
    json out{{"flagged", v.flagged}, {"stage", std::string(to_string(v.stage))}, {"reason", v.reason}};
    if (v.refusal_fraction) out["refusal_fraction"] = *v.refusal_fraction;
    return out;
}

std::string evaluate(const std::string& corpus_path, const std::string& config_path, std::vector<std::size_t> k_values,
                     std::uint64_t seed, const std::string& system) {
    if (system != "pop" && system != "matcha") throw ConfigError("unknown system " + system);
    const auto corpus = parse_corpus(read_file(corpus_path));
    EvalOptions opts{std::move(k_values), seed, {}};
    const auto engine = Engine::from_config(load_config(config_path));
    const auto recommender = system == "pop" ? pop_recommender(engine->catalog()) : engine_recommender(*engine);
    json reports = json::array();
    for (const auto& r : run_eval(corpus, recommender, engine->catalog(), opts)) reports.push_back(to_json(r));
    return reports.dump();
}

}  // namespace

PYBIND11_MODULE(_matcha, m) {
    m.doc() = "Native core of the matcha game recommender";

    auto base = py::register_exception<Error>(m, "MatchaError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<NotFound>(m, "NotFound", base.ptr());

    py::class_<Catalog>(m, "Catalog")
        .def_static(
            "load",
            [](const std::filesystem::path& games, std::optional<std::filesystem::path> plays,
               const std::filesystem::path& vocab) { return Catalog::load(games, plays, vocab); },
            py::arg("games"), py::arg("plays") = py::none(), py::arg("vocab"))
        .def("__len__", &Catalog::size)
        .def("__contains__", &Catalog::contains)
        .def("popularity_rank", &Catalog::popularity_rank)
        .def("top_n_popular", &Catalog::top_n_popular);

    py::class_<Engine>(m, "Engine")
        .def_static("from_config", [](const std::filesystem::path& p) { return Engine::from_config(load_config(p)); })
        .def_property_readonly("catalog_size", [](const Engine& e) { return e.catalog().size(); })
        .def(
            "recommend_json",
            [](const Engine& e, const std::string& query, std::size_t k, std::uint64_t seed) {
                PipelineResult r;
                {
                    py::gil_scoped_release release;
                    r = e.recommend(query, k, seed);
                }
                return result_json(r, e.catalog()).dump();
            },
            py::arg("query"), py::arg("k") = 5, py::arg("seed") = 0)
        .def(
            "screen_json",
            [](const Engine& e, const std::string& query, std::uint64_t seed) {
                return verdict_json(e.screen(query, seed)).dump();
            },
            py::arg("query"), py::arg("seed") = 0);

    m.def("evaluate_json", &evaluate, py::arg("corpus"), py::arg("config"), py::arg("k_values") = std::vector<std::size_t>{5, 10},
          py::arg("seed") = 0, py::arg("system") = "matcha");
    m.def("pop_baseline", &pop_baseline, py::arg("catalog"), py::arg("k"), py::arg("seed") = 0);
    m.def("parse_judge_score", [](const std::string& s) { return parse_judge_score(s); });

    auto mm = m.def_submodule("metrics");
    mm.def("factual_at_k", &metrics::factual_at_k);
    mm.def("hit_at_k", &metrics::hit_at_k);
    mm.def("precision_at_k", &metrics::precision_at_k);
    mm.def("pop50_at_k", &metrics::pop50_at_k);
    mm.def("rpop50_at_k", &metrics::rpop50_at_k);
    mm.def("entropy_at_k", &metrics::entropy_at_k);
    mm.def("maxfreq_at_k", &metrics::maxfreq_at_k);
}
