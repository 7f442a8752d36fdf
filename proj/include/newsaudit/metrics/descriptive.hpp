#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "newsaudit/core/error.hpp"
#include "newsaudit/metrics/exposure.hpp"
#include "newsaudit/metrics/rtd.hpp"

namespace newsaudit::metrics {

using WarningSink = std::function<void(const std::string&)>;

// Distinct outlet domains an engine surfaced for one topic (all days in
// scope). Empty scope is worth a warning but not an error: a missing
// engine/topic cell usually means collection failures upstream.
inline long unique_outlets(const ExposureTable& table, const std::string& engine,
                           const std::string& topic,
                           PersonaScope scope = PersonaScope::baseline_only,
                           const WarningSink& warn = nullptr) {
    std::set<std::string> domains;
    bool any = false;
    for (const auto& row : table.rows) {
        if (row.engine != engine || row.topic != topic || !in_scope(row, scope)) continue;
        any = true;
        domains.insert(row.domain);
    }
    if (!any && warn)
        warn("unique_outlets: no rows for engine '" + engine + "' topic '" + topic + "'");
    return static_cast<long>(domains.size());
}

inline long unique_outlets_global(const ExposureTable& table, const std::string& engine,
                                  PersonaScope scope = PersonaScope::baseline_only) {
    std::set<std::string> domains;
    for (const auto& row : table.rows)
        if (row.engine == engine && in_scope(row, scope)) domains.insert(row.domain);
    return static_cast<long>(domains.size());
}

inline long serp_result_count(const ExposureTable& table, const std::string& engine,
                              PersonaScope scope = PersonaScope::baseline_only) {
    long n = 0;
    for (const auto& row : table.rows)
        if (row.engine == engine && in_scope(row, scope)) ++n;
    return n;
}

inline std::vector<std::string> engines_in(const ExposureTable& table,
                                           PersonaScope scope = PersonaScope::all) {
    std::set<std::string> ids;
    for (const auto& row : table.rows)
        if (in_scope(row, scope)) ids.insert(row.engine);
    return {ids.begin(), ids.end()};
}

inline std::vector<std::string> topics_in(const ExposureTable& table,
                                          PersonaScope scope = PersonaScope::all) {
    std::set<std::string> ids;
    for (const auto& row : table.rows)
        if (in_scope(row, scope)) ids.insert(row.topic);
    return {ids.begin(), ids.end()};
}

// Occurrence counts per domain, globally or for one topic.
inline AttentionVector attention(const ExposureTable& table, const std::string& engine,
                                 const std::string& topic_or_empty = "",
                                 PersonaScope scope = PersonaScope::baseline_only) {
    AttentionVector v;
    v.engine = engine;
    v.scope = topic_or_empty.empty() ? "global" : topic_or_empty;
    for (const auto& row : table.rows) {
        if (row.engine != engine || !in_scope(row, scope)) continue;
        if (!topic_or_empty.empty() && row.topic != topic_or_empty) continue;
        ++v.counts[row.domain];
    }
    return v;
}

struct CategoryComposition {
    std::map<std::string, double> shares; // over rows with a known category
    long categorized = 0;
    long missing = 0;
};

// Share of each IAB category in an engine's SERP rows. Shares are computed
// over categorized rows only; the missing count is reported alongside.
inline CategoryComposition category_composition(const ExposureTable& table,
                                                const std::string& engine,
                                                PersonaScope scope = PersonaScope::baseline_only) {
    CategoryComposition out;
    std::map<std::string, long> counts;
    for (const auto& row : table.rows) {
        if (row.engine != engine || !in_scope(row, scope)) continue;
        if (row.iab_category) {
            ++counts[*row.iab_category];
            ++out.categorized;
        } else {
            ++out.missing;
        }
    }
    if (out.categorized == 0)
        throw ParameterError("category_composition: no categorized rows for engine '" + engine +
                             "'");
    for (const auto& [cat, n] : counts)
        out.shares[cat] = static_cast<double>(n) / static_cast<double>(out.categorized);
    return out;
}

} // namespace newsaudit::metrics
