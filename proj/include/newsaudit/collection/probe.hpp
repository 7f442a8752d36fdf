#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsaudit/collection/persona.hpp"
#include "newsaudit/collection/prompts.hpp"

namespace newsaudit::collection {

// The default audit corpus: 24 sociopolitical topics, named by their
// canonical Wikipedia article titles.
inline const std::vector<std::string>& default_topics() {
    static const std::vector<std::string> topics = {
        "Russian invasion of Ukraine",
        "Gaza war",
        "Romanian Presidential Election",
        "Poland Presidential Election",
        "Red Sea crisis",
        "US tariffs",
        "Conclave",
        "German AfD ruled extremist",
        "Climate change",
        "Freedom of the press (US)",
        "South-west US measles outbreak",
        "India–Pakistan border skirmishes",
        "Iran–United States relations",
        "M23 campaign",
        "US immigration policy",
        "Abortion policy",
        "Gender identity",
        "Gun control policy",
        "Marijuana legalization",
        "Same-sex marriage",
        "LGBTQ rights",
        "Inflation",
        "Sea-level rise",
        "Persecution of Uyghurs in China",
    };
    return topics;
}

// One query intent: (engine, topic, persona, day) plus its rendered prompts.
struct ProbeSpec {
    std::string engine_id;
    std::string topic;
    Persona persona;
    std::string day; // ISO date, YYYY-MM-DD
    std::string system_prompt;
    std::string user_prompt;

    // Stable identity used for fixture lookup and provenance joins.
    std::string key() const {
        return engine_id + "\x1f" + topic + "\x1f" + persona.trait_string() + "\x1f" + day;
    }
};

inline ProbeSpec make_probe(std::string engine_id, std::string topic, Persona persona,
                            std::string day) {
    auto [system_prompt, user_prompt] = render_prompts(topic, persona);
    return ProbeSpec{std::move(engine_id), std::move(topic), persona, std::move(day),
                     std::move(system_prompt), std::move(user_prompt)};
}

// Cartesian plan grouped by topic (outer), then day, persona, engine. The
// per-topic grouping is what run_collection's sequential-topics contract
// expects.
inline std::vector<ProbeSpec> build_plan(const std::vector<std::string>& topics,
                                         const std::vector<std::string>& engine_ids,
                                         const std::vector<Persona>& personas,
                                         const std::vector<std::string>& days) {
    std::vector<ProbeSpec> plan;
    plan.reserve(topics.size() * engine_ids.size() * personas.size() * days.size());
    for (const auto& topic : topics)
        for (const auto& day : days)
            for (const auto& persona : personas)
                for (const auto& engine : engine_ids)
                    plan.push_back(make_probe(engine, topic, persona, day));
    return plan;
}

// Verbatim agent response with transport provenance.
struct RawAnswer {
    ProbeSpec probe;
    std::string text; // stored unmodified
    std::string fetched_at;
    std::map<std::string, std::string> transport_meta;
};

inline nlohmann::ordered_json raw_answer_to_json(const RawAnswer& a) {
    nlohmann::ordered_json j;
    j["engine"] = a.probe.engine_id;
    j["topic"] = a.probe.topic;
    j["persona"] = to_json(a.probe.persona);
    j["day"] = a.probe.day;
    j["fetched_at"] = a.fetched_at;
    j["text"] = a.text;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : a.transport_meta) meta[k] = v;
    j["meta"] = meta;
    return j;
}

inline RawAnswer raw_answer_from_json(const nlohmann::ordered_json& j) {
    RawAnswer a;
    a.probe = make_probe(j.at("engine").get<std::string>(), j.at("topic").get<std::string>(),
                         persona_from_json(j.at("persona")), j.at("day").get<std::string>());
    a.text = j.at("text").get<std::string>();
    a.fetched_at = j.value("fetched_at", "");
    if (j.contains("meta"))
        for (const auto& [k, v] : j.at("meta").items())
            a.transport_meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return a;
}

} // namespace newsaudit::collection
