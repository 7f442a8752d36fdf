#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>

#include "newsaudit/core/error.hpp"
#include "newsaudit/core/strings.hpp"

namespace newsaudit::enrichment {

// MBFC ideological bias, 7-point scale centered on least-biased.
inline constexpr std::array<std::pair<const char*, int>, 7> kBiasScale = {{
    {"far-left", -3},
    {"left", -2},
    {"left-center", -1},
    {"least-biased", 0},
    {"right-center", 1},
    {"right", 2},
    {"extreme-right", 3},
}};

// MBFC factual-reporting scale, six labels coded 0 (very low) .. 5 (very high).
inline constexpr std::array<std::pair<const char*, int>, 6> kFactualityScale = {{
    {"very low", 0},
    {"low", 1},
    {"mixed", 2},
    {"mostly factual", 3},
    {"high", 4},
    {"very high", 5},
}};

// Wikipedia Perennial Sources labels, coded so larger means more reliable.
inline constexpr std::array<std::pair<const char*, int>, 4> kPslScale = {{
    {"deprecated", 0},
    {"generally_unreliable", 1},
    {"no_consensus", 2},
    {"generally_reliable", 3},
}};

namespace detail {
// Tolerant label canonicalization: lowercase, spaces/hyphens are
// interchangeable with the canonical separator of each vocabulary.
inline std::string canon(std::string_view label, char sep) {
    std::string out;
    for (char c : str::lower(str::trim(label)))
        out += (c == ' ' || c == '-' || c == '_') ? sep : c;
    return out;
}
} // namespace detail

inline std::optional<int> bias_score(std::string_view label) {
    const auto key = detail::canon(label, '-');
    for (const auto& [name, score] : kBiasScale)
        if (key == name) return score;
    return std::nullopt;
}

inline std::optional<int> factuality_score(std::string_view label) {
    const auto key = detail::canon(label, ' ');
    for (const auto& [name, score] : kFactualityScale)
        if (key == name) return score;
    return std::nullopt;
}

inline std::optional<int> psl_score(std::string_view label) {
    const auto key = detail::canon(label, '_');
    for (const auto& [name, score] : kPslScale)
        if (key == name) return score;
    return std::nullopt;
}

inline std::string psl_label_for_score(int score) {
    for (const auto& [name, s] : kPslScale)
        if (s == score) return name;
    throw ParameterError("psl_label_for_score: invalid score " + std::to_string(score));
}

// A domain's external annotations. Absent optionals mean "not covered by
// that dataset"; analyses filter per score, never per profile.
struct OutletProfile {
    std::string domain;
    std::optional<int> mbfc_bias;        // [-3, 3]
    std::optional<int> mbfc_factuality;  // [0, 5]
    std::optional<std::string> psl_label;
    std::optional<int> psl_score;        // [0, 3]
    std::optional<std::string> iab_category;
    std::optional<double> iab_confidence; // [0, 1]
};

} // namespace newsaudit::enrichment
