#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matcha/catalog.hpp"

namespace matcha::metrics {

using RecList = std::vector<std::string>;

inline constexpr std::size_t kPopularCutoff = 50;

// Share of the k slots holding a real catalog item; missing slots count as non-factual.
double factual_at_k(const RecList& recs, const Catalog& catalog, std::size_t k);

// 1 if any ground-truth item is among the first k recommendations.
int hit_at_k(const RecList& recs, const std::vector<std::string>& ground_truth, std::size_t k);

// |distinct top-k ∩ gt| / k.
double precision_at_k(const RecList& recs, const std::vector<std::string>& ground_truth, std::size_t k);

// |distinct top-k ∩ top-50 by upvotes| / k.
double pop50_at_k(const RecList& recs, const Catalog& catalog, std::size_t k);

// Share of a (non-empty) ground-truth set that is in the top 50; 0 for an empty set.
double pop50_of_set(const std::vector<std::string>& ids, const Catalog& catalog);

// rec / gt; nullopt (undefined) when gt_pop50 == 0.
std::optional<double> rpop50_at_k(double recs_pop50, double gt_pop50);

// Shannon entropy in bits of item frequencies over all top-k slots.
double entropy_at_k(const std::vector<RecList>& all_recs, std::size_t k);

// Max over items of the number of top-k lists containing it, over num_requests.
double maxfreq_at_k(const std::vector<RecList>& all_recs, std::size_t k, std::size_t num_requests);

}  // namespace matcha::metrics
