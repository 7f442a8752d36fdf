#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "newsaudit/attribution/domain.hpp"
#include "newsaudit/attribution/expand.hpp"
#include "newsaudit/attribution/url.hpp"
#include "newsaudit/collection/probe.hpp"

namespace newsaudit::attribution {

inline constexpr std::size_t kSerpCap = 10; // top-10 result cap

struct SerpEntry {
    int rank = 0; // 1-based, contiguous
    std::string title;
    std::string raw_url;
    std::string final_url;
    std::string domain;
    double normalized_rank = 0.0; // rank / entries-in-record
    bool expansion_failed = false;
};

// Ordered, attributed result list for one probe.
struct SerpRecord {
    std::string engine;
    std::string topic;
    collection::Persona persona;
    std::string day;
    std::vector<SerpEntry> entries;
    bool truncated = false;        // more than kSerpCap attributable items existed
    bool attribution_miss = false; // no URLs could be extracted at all
    int dropped = 0;               // entries lost to unparseable hosts

    std::string key() const {
        return engine + "\x1f" + topic + "\x1f" + persona.trait_string() + "\x1f" + day;
    }
};

// extract -> expand (shorteners only) -> normalize, preserving answer order,
// then cap at ten. Unparseable hosts drop the entry and count in `dropped`;
// zero extracted URLs flags the record as an attribution miss so batch
// accounting still adds up.
inline SerpRecord attribute(const collection::RawAnswer& answer, RedirectResolver& resolver,
                            const NormalizationRules& rules,
                            const std::set<std::string>& shortener_hosts,
                            int max_hops = 5) {
    SerpRecord record;
    record.engine = answer.probe.engine_id;
    record.topic = answer.probe.topic;
    record.persona = answer.probe.persona;
    record.day = answer.probe.day;

    const auto items = extract_urls(answer.text);
    if (items.empty()) {
        record.attribution_miss = true;
        return record;
    }

    std::vector<SerpEntry> valid;
    valid.reserve(items.size());
    for (const auto& [title, url] : items) {
        SerpEntry entry;
        entry.title = title;
        entry.raw_url = url;
        const auto expanded = expand_url(url, resolver, shortener_hosts, max_hops);
        entry.final_url = expanded.url;
        entry.expansion_failed = expanded.failed;
        try {
            entry.domain = normalize_domain(entry.final_url, rules);
        } catch (const ParameterError&) {
            ++record.dropped;
            continue;
        }
        valid.push_back(std::move(entry));
    }

    if (valid.empty()) {
        record.attribution_miss = true;
        return record;
    }
    if (valid.size() > kSerpCap) {
        record.truncated = true;
        valid.resize(kSerpCap);
    }
    const double len = static_cast<double>(valid.size());
    for (std::size_t i = 0; i < valid.size(); ++i) {
        valid[i].rank = static_cast<int>(i) + 1;
        valid[i].normalized_rank = static_cast<double>(i + 1) / len;
    }
    record.entries = std::move(valid);
    return record;
}

inline nlohmann::ordered_json serp_to_json(const SerpRecord& r) {
    nlohmann::ordered_json j;
    j["engine"] = r.engine;
    j["topic"] = r.topic;
    j["persona"] = collection::to_json(r.persona);
    j["day"] = r.day;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : r.entries) {
        nlohmann::ordered_json je;
        je["rank"] = e.rank;
        je["title"] = e.title;
        je["raw_url"] = e.raw_url;
        je["final_url"] = e.final_url;
        je["domain"] = e.domain;
        je["normalized_rank"] = e.normalized_rank;
        je["expansion_failed"] = e.expansion_failed;
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    j["truncated"] = r.truncated;
    j["attribution_miss"] = r.attribution_miss;
    j["dropped"] = r.dropped;
    return j;
}

inline SerpRecord serp_from_json(const nlohmann::ordered_json& j) {
    SerpRecord r;
    r.engine = j.at("engine").get<std::string>();
    r.topic = j.at("topic").get<std::string>();
    r.persona = collection::persona_from_json(j.at("persona"));
    r.day = j.at("day").get<std::string>();
    for (const auto& je : j.at("entries")) {
        SerpEntry e;
        e.rank = je.at("rank").get<int>();
        e.title = je.at("title").get<std::string>();
        e.raw_url = je.at("raw_url").get<std::string>();
        e.final_url = je.at("final_url").get<std::string>();
        e.domain = je.at("domain").get<std::string>();
        e.normalized_rank = je.at("normalized_rank").get<double>();
        e.expansion_failed = je.value("expansion_failed", false);
        r.entries.push_back(std::move(e));
    }
    r.truncated = j.value("truncated", false);
    r.attribution_miss = j.value("attribution_miss", false);
    r.dropped = j.value("dropped", 0);
    return r;
}

} // namespace newsaudit::attribution
