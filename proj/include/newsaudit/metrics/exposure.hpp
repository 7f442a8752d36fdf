#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "newsaudit/attribution/serp.hpp"
#include "newsaudit/core/csv.hpp"
#include "newsaudit/core/error.hpp"
#include "newsaudit/enrichment/scales.hpp"

namespace newsaudit::metrics {

// One SERP entry joined with its outlet profile: the long-format observation
// every downstream measure and model consumes.
struct ExposureRow {
    std::string engine;
    std::string topic;
    std::string day;
    std::string persona; // trait string; empty = baseline condition
    int rank = 0;
    double normalized_rank = 0.0;
    std::string domain;
    std::optional<int> mbfc_bias;
    std::optional<int> mbfc_factuality;
    std::optional<int> psl_score;
    std::optional<std::string> iab_category;
};

struct ExposureTable {
    std::vector<ExposureRow> rows;
};

// Join SERP records with profiles. Duplicate (engine, topic, day, persona,
// rank) coordinates indicate a corrupted store and abort.
inline ExposureTable
build_exposure(const std::vector<attribution::SerpRecord>& records,
               const std::map<std::string, enrichment::OutletProfile>& profiles) {
    ExposureTable table;
    std::set<std::string> seen;
    for (const auto& record : records) {
        if (record.attribution_miss) continue;
        for (const auto& entry : record.entries) {
            ExposureRow row;
            row.engine = record.engine;
            row.topic = record.topic;
            row.day = record.day;
            row.persona = record.persona.trait_string();
            row.rank = entry.rank;
            row.normalized_rank = entry.normalized_rank;
            row.domain = entry.domain;
            const std::string coord = record.key() + "\x1f" + std::to_string(entry.rank);
            if (!seen.insert(coord).second)
                throw LoadError("exposure table: duplicate observation for " + record.engine +
                                "/" + record.topic + "/" + record.day + " rank " +
                                std::to_string(entry.rank));
            if (auto it = profiles.find(entry.domain); it != profiles.end()) {
                row.mbfc_bias = it->second.mbfc_bias;
                row.mbfc_factuality = it->second.mbfc_factuality;
                row.psl_score = it->second.psl_score;
                row.iab_category = it->second.iab_category;
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

inline void write_exposure_csv(const ExposureTable& table, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(table.rows.size());
    auto opt_int = [](const std::optional<int>& v) { return v ? std::to_string(*v) : ""; };
    for (const auto& r : table.rows) {
        char nrank[32];
        std::snprintf(nrank, sizeof nrank, "%.10g", r.normalized_rank);
        rows.push_back({r.engine, r.topic, r.day, r.persona, std::to_string(r.rank), nrank,
                        r.domain, opt_int(r.mbfc_bias), opt_int(r.mbfc_factuality),
                        opt_int(r.psl_score), r.iab_category.value_or("")});
    }
    csv::write_file(path,
                    {"engine", "topic", "day", "persona", "rank", "normalized_rank", "domain",
                     "mbfc_bias", "mbfc_factuality", "psl_score", "iab_category"},
                    rows);
}

inline ExposureTable read_exposure_csv(const std::string& path) {
    const auto t = csv::read_file(path);
    const std::vector<std::string> expected = {"engine",  "topic",           "day",
                                               "persona", "rank",            "normalized_rank",
                                               "domain",  "mbfc_bias",       "mbfc_factuality",
                                               "psl_score", "iab_category"};
    if (t.header != expected) throw LoadError(path, 1, "unexpected exposure table header");
    ExposureTable table;
    long row_no = 1;
    for (const auto& row : t.rows) {
        ++row_no;
        ExposureRow r;
        r.engine = row[0];
        r.topic = row[1];
        r.day = row[2];
        r.persona = row[3];
        try {
            r.rank = std::stoi(row[4]);
            r.normalized_rank = std::stod(row[5]);
            r.domain = row[6];
            if (!row[7].empty()) r.mbfc_bias = std::stoi(row[7]);
            if (!row[8].empty()) r.mbfc_factuality = std::stoi(row[8]);
            if (!row[9].empty()) r.psl_score = std::stoi(row[9]);
            if (!row[10].empty()) r.iab_category = row[10];
        } catch (const std::exception& e) {
            throw LoadError(path, row_no, e.what());
        }
        table.rows.push_back(std::move(r));
    }
    return table;
}

// Row filters used to slice the baseline condition from persona-grid reruns.
enum class PersonaScope { baseline_only, grid_only, all };

inline bool in_scope(const ExposureRow& row, PersonaScope scope) {
    switch (scope) {
    case PersonaScope::baseline_only: return row.persona.empty();
    case PersonaScope::grid_only: return !row.persona.empty();
    case PersonaScope::all: return true;
    }
    return true;
}

} // namespace newsaudit::metrics
