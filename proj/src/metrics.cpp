#include "matcha/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "matcha/errors.hpp"

namespace matcha::metrics {

namespace {

void require_k(std::size_t k) {
    if (k == 0) throw PreconditionError("k must be positive");
}

std::set<std::string> top_k_set(const RecList& recs, std::size_t k) {
    const auto n = std::min(k, recs.size());
    return {recs.begin(), recs.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

double factual_at_k(const RecList& recs, const Catalog& catalog, std::size_t k) {
    require_k(k);
    std::size_t real = 0;
    for (std::size_t i = 0; i < std::min(k, recs.size()); ++i)
        if (catalog.contains(recs[i])) ++real;
    return static_cast<double>(real) / static_cast<double>(k);
}

int hit_at_k(const RecList& recs, const std::vector<std::string>& ground_truth, std::size_t k) {
    require_k(k);
    const std::set<std::string> gt(ground_truth.begin(), ground_truth.end());
    for (std::size_t i = 0; i < std::min(k, recs.size()); ++i)
        if (gt.count(recs[i])) return 1;
    return 0;
}

double precision_at_k(const RecList& recs, const std::vector<std::string>& ground_truth, std::size_t k) {
    require_k(k);
    const std::set<std::string> gt(ground_truth.begin(), ground_truth.end());
    std::size_t n = 0;
    for (const auto& id : top_k_set(recs, k)) n += gt.count(id);
    return static_cast<double>(n) / static_cast<double>(k);
}

double pop50_at_k(const RecList& recs, const Catalog& catalog, std::size_t k) {
    require_k(k);
    const auto top = catalog.top_n_popular(kPopularCutoff);
    const std::set<std::string> popular(top.begin(), top.end());
    std::size_t n = 0;
    for (const auto& id : top_k_set(recs, k)) n += popular.count(id);
    return static_cast<double>(n) / static_cast<double>(k);
}

double pop50_of_set(const std::vector<std::string>& ids, const Catalog& catalog) {
    const std::set<std::string> distinct(ids.begin(), ids.end());
    if (distinct.empty()) return 0.0;
    const auto top = catalog.top_n_popular(kPopularCutoff);
    const std::set<std::string> popular(top.begin(), top.end());
    std::size_t n = 0;
    for (const auto& id : distinct) n += popular.count(id);
    return static_cast<double>(n) / static_cast<double>(distinct.size());
}

std::optional<double> rpop50_at_k(double recs_pop50, double gt_pop50) {
    if (gt_pop50 == 0.0) return std::nullopt;
    return recs_pop50 / gt_pop50;
}

double entropy_at_k(const std::vector<RecList>& all_recs, std::size_t k) {
    require_k(k);
    std::map<std::string, std::size_t> counts;
    std::size_t slots = 0;
    for (const auto& recs : all_recs) {
        for (std::size_t i = 0; i < std::min(k, recs.size()); ++i) {
            ++counts[recs[i]];
            ++slots;
        }
    }
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(slots);
        h -= p * std::log2(p);
    }
    return h == 0.0 ? 0.0 : h;
}

double maxfreq_at_k(const std::vector<RecList>& all_recs, std::size_t k, std::size_t num_requests) {
    require_k(k);
    if (num_requests == 0) throw PreconditionError("maxfreq needs at least one request");
    std::map<std::string, std::size_t> lists_containing;
    for (const auto& recs : all_recs)
        for (const auto& id : top_k_set(recs, k)) ++lists_containing[id];
    std::size_t best = 0;
    for (const auto& [_, c] : lists_containing) best = std::max(best, c);
    return static_cast<double>(best) / static_cast<double>(num_requests);
}

}  // namespace matcha::metrics
