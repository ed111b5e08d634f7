#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace matcha::text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string trim(std::string_view s);

// Splits on runs of whitespace; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

// Splits on `sep`, trimming each piece and dropping empty ones.
std::vector<std::string> split_list(std::string_view s, char sep);

// Lowercased alphanumeric runs. "Murder-Mystery 2!" -> {"murder", "mystery", "2"}.
std::vector<std::string> word_tokens(std::string_view s);

std::vector<std::string> lines(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// Character trigrams of the lowercased word sequence, padded as "  w1 w2 ".
std::unordered_set<std::string> trigrams(std::string_view s);

// Jaccard overlap of the trigram sets, in [0, 1].
double trigram_similarity(std::string_view a, std::string_view b);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace matcha::text
