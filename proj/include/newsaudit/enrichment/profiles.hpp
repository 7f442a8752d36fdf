#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsaudit/enrichment/datasets.hpp"
#include "newsaudit/enrichment/iab.hpp"
#include "newsaudit/enrichment/scales.hpp"

namespace newsaudit::enrichment {

struct SourceCoverage {
    long matched = 0;
    long missing = 0;
};

struct CoverageReport {
    SourceCoverage mbfc;
    SourceCoverage psl;
    SourceCoverage iab;
    long retryable_iab_failures = 0;
};

struct EnrichmentSources {
    const MbfcDataset* mbfc = nullptr;
    const PslDataset* psl = nullptr;
    IabProvider* iab_provider = nullptr;
    const std::map<std::string, std::string>* iab_overrides = nullptr;
    IabCache* iab_cache = nullptr;
    std::string now;
};

struct ProfileBuildResult {
    std::vector<OutletProfile> profiles; // sorted by domain
    CoverageReport coverage;
};

// One profile per domain, with per-source hit/miss accounting. Missing scores
// never drop a domain here; each analysis filters on the score it needs.
inline ProfileBuildResult build_profiles(const std::set<std::string>& domains,
                                         const EnrichmentSources& sources) {
    ProfileBuildResult result;
    static const std::map<std::string, std::string> no_overrides;
    static IabCache ephemeral_cache;
    const auto& overrides = sources.iab_overrides ? *sources.iab_overrides : no_overrides;
    IabCache& cache = sources.iab_cache ? *sources.iab_cache : ephemeral_cache;

    for (const auto& domain : domains) {
        OutletProfile p;
        p.domain = domain;
        if (sources.mbfc) {
            if (auto entry = sources.mbfc->find(domain)) {
                p.mbfc_bias = entry->bias;
                p.mbfc_factuality = entry->factuality;
                ++result.coverage.mbfc.matched;
            } else {
                ++result.coverage.mbfc.missing;
            }
        } else {
            ++result.coverage.mbfc.missing;
        }
        if (sources.psl) {
            if (auto label = sources.psl->find(domain)) {
                p.psl_label = *label;
                p.psl_score = psl_score(*label);
                ++result.coverage.psl.matched;
            } else {
                ++result.coverage.psl.missing;
            }
        } else {
            ++result.coverage.psl.missing;
        }
        const IabResult iab =
            categorize_iab(domain, sources.iab_provider, overrides, cache, sources.now);
        if (iab.category) {
            p.iab_category = iab.category;
            p.iab_confidence = iab.confidence;
            ++result.coverage.iab.matched;
        } else {
            ++result.coverage.iab.missing;
            if (iab.retryable_failure) ++result.coverage.retryable_iab_failures;
        }
        result.profiles.push_back(std::move(p));
    }
    return result;
}

inline nlohmann::ordered_json profile_to_json(const OutletProfile& p) {
    nlohmann::ordered_json j;
    j["domain"] = p.domain;
    j["mbfc_bias"] = p.mbfc_bias ? nlohmann::ordered_json(*p.mbfc_bias) : nullptr;
    j["mbfc_factuality"] =
        p.mbfc_factuality ? nlohmann::ordered_json(*p.mbfc_factuality) : nullptr;
    j["psl_label"] = p.psl_label ? nlohmann::ordered_json(*p.psl_label) : nullptr;
    j["psl_score"] = p.psl_score ? nlohmann::ordered_json(*p.psl_score) : nullptr;
    j["iab_category"] = p.iab_category ? nlohmann::ordered_json(*p.iab_category) : nullptr;
    j["iab_confidence"] = p.iab_confidence ? nlohmann::ordered_json(*p.iab_confidence) : nullptr;
    return j;
}

inline OutletProfile profile_from_json(const nlohmann::ordered_json& j) {
    OutletProfile p;
    p.domain = j.at("domain").get<std::string>();
    if (!j.at("mbfc_bias").is_null()) p.mbfc_bias = j["mbfc_bias"].get<int>();
    if (!j.at("mbfc_factuality").is_null()) p.mbfc_factuality = j["mbfc_factuality"].get<int>();
    if (!j.at("psl_label").is_null()) p.psl_label = j["psl_label"].get<std::string>();
    if (!j.at("psl_score").is_null()) p.psl_score = j["psl_score"].get<int>();
    if (!j.at("iab_category").is_null()) p.iab_category = j["iab_category"].get<std::string>();
    if (!j.at("iab_confidence").is_null()) p.iab_confidence = j["iab_confidence"].get<double>();
    return p;
}

inline nlohmann::ordered_json coverage_to_json(const CoverageReport& c) {
    nlohmann::ordered_json j;
    auto one = [](const SourceCoverage& s) {
        nlohmann::ordered_json o;
        o["matched"] = s.matched;
        o["missing"] = s.missing;
        return o;
    };
    j["mbfc"] = one(c.mbfc);
    j["psl"] = one(c.psl);
    j["iab"] = one(c.iab);
    j["retryable_iab_failures"] = c.retryable_iab_failures;
    return j;
}

} // namespace newsaudit::enrichment
