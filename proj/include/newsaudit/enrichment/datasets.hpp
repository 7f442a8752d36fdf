#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "newsaudit/attribution/domain.hpp"
#include "newsaudit/core/csv.hpp"
#include "newsaudit/core/error.hpp"
#include "newsaudit/enrichment/scales.hpp"

namespace newsaudit::enrichment {

using WarningSink = std::function<void(const std::string&)>;

namespace detail {
inline int find_column(const csv::Table& t, const std::string& name, const std::string& path) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (std::string(str::trim(t.header[i])) == name) return static_cast<int>(i);
    throw LoadError(path, 1, "missing required column '" + name + "'");
}

inline std::string snapshot_tag(const csv::Table& t) {
    for (const auto& c : t.comments) {
        auto body = std::string(str::trim(std::string_view(c).substr(1)));
        if (str::starts_with(body, "snapshot:"))
            return std::string(str::trim(std::string_view(body).substr(9)));
    }
    return "";
}
} // namespace detail

struct MbfcEntry {
    int bias;
    int factuality;
};

struct MbfcDataset {
    std::map<std::string, MbfcEntry> by_domain;
    std::string snapshot; // optional "# snapshot: ..." tag from the file

    std::optional<MbfcEntry> find(const std::string& domain) const {
        auto it = by_domain.find(domain);
        if (it == by_domain.end()) return std::nullopt;
        return it->second;
    }
};

// CSV columns: domain,bias_label,factuality_label. Labels outside the two
// vocabularies abort the load (a silent skip would bias every downstream
// score); duplicate domains take the last row with a warning.
inline MbfcDataset load_mbfc(const std::string& path, const attribution::NormalizationRules& rules,
                             const WarningSink& warn = nullptr) {
    const auto table = csv::read_file(path);
    MbfcDataset ds;
    ds.snapshot = detail::snapshot_tag(table);
    if (table.header.empty() && table.rows.empty()) return ds;
    const int dom_col = detail::find_column(table, "domain", path);
    const int bias_col = detail::find_column(table, "bias_label", path);
    const int fact_col = detail::find_column(table, "factuality_label", path);
    long row_no = 1;
    for (const auto& row : table.rows) {
        ++row_no;
        const std::string raw_domain = row[dom_col];
        if (std::string(str::trim(raw_domain)).empty())
            throw LoadError(path, row_no, "empty domain");
        const auto bias = bias_score(row[bias_col]);
        if (!bias) throw LoadError(path, row_no, "unknown bias label '" + row[bias_col] + "'");
        const auto fact = factuality_score(row[fact_col]);
        if (!fact)
            throw LoadError(path, row_no, "unknown factuality label '" + row[fact_col] + "'");
        const std::string domain = attribution::normalize_host(raw_domain, rules);
        if (ds.by_domain.count(domain) && warn)
            warn(path + ":" + std::to_string(row_no) + ": duplicate domain '" + domain +
                 "', last row wins");
        ds.by_domain[domain] = MbfcEntry{*bias, *fact};
    }
    return ds;
}

struct PslDataset {
    std::map<std::string, std::string> label_by_domain; // canonical labels
    std::string snapshot;

    std::optional<std::string> find(const std::string& domain) const {
        auto it = label_by_domain.find(domain);
        if (it == label_by_domain.end()) return std::nullopt;
        return it->second;
    }
};

// CSV columns: domain,psl_label with the four perennial-sources labels.
inline PslDataset load_psl(const std::string& path, const attribution::NormalizationRules& rules,
                           const WarningSink& warn = nullptr) {
    const auto table = csv::read_file(path);
    PslDataset ds;
    ds.snapshot = detail::snapshot_tag(table);
    if (table.header.empty() && table.rows.empty()) return ds;
    const int dom_col = detail::find_column(table, "domain", path);
    const int label_col = detail::find_column(table, "psl_label", path);
    long row_no = 1;
    for (const auto& row : table.rows) {
        ++row_no;
        if (std::string(str::trim(row[dom_col])).empty())
            throw LoadError(path, row_no, "empty domain");
        const auto score = psl_score(row[label_col]);
        if (!score) throw LoadError(path, row_no, "unknown psl label '" + row[label_col] + "'");
        const std::string domain = attribution::normalize_host(row[dom_col], rules);
        if (ds.label_by_domain.count(domain) && warn)
            warn(path + ":" + std::to_string(row_no) + ": duplicate domain '" + domain +
                 "', last row wins");
        ds.label_by_domain[domain] = psl_label_for_score(*score);
    }
    return ds;
}

// Manual IAB overrides: domain,iab_category.
inline std::map<std::string, std::string>
load_iab_overrides(const std::string& path, const attribution::NormalizationRules& rules) {
    const auto table = csv::read_file(path);
    std::map<std::string, std::string> overrides;
    if (table.header.empty() && table.rows.empty()) return overrides;
    const int dom_col = detail::find_column(table, "domain", path);
    const int cat_col = detail::find_column(table, "iab_category", path);
    long row_no = 1;
    for (const auto& row : table.rows) {
        ++row_no;
        overrides[attribution::normalize_host(row[dom_col], rules)] =
            std::string(str::trim(row[cat_col]));
    }
    return overrides;
}

} // namespace newsaudit::enrichment
