#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "matcha/intent.hpp"
#include "matcha/toolbox.hpp"

namespace matcha {

struct Candidate {
    std::string game_id;
    std::set<std::string> sources;  // tool names, never empty
    std::size_t base_popularity_rank = 0;
};

struct CandidatePool {
    static constexpr std::size_t kMaxSize = 30;
    static constexpr std::size_t kMinGathered = 10;

    std::vector<Candidate> candidates;
    UserIntent intent;
    std::vector<ToolResult> tool_results;
    std::vector<std::string> notes;

    std::vector<std::string> ids() const;
};

/// Fixed tool plan: similarity tools per liked game, search per preferred
/// genre, mood and age-group tools, defaults when the pool is thin; then the
/// device and disliked-genre hard filters, a refill from defaults, and dedup.
CandidatePool generate(const UserIntent& intent, const Toolbox& toolbox, std::uint64_t seed);

}  // namespace matcha
