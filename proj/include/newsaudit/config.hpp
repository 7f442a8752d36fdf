#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsaudit/collection/persona.hpp"
#include "newsaudit/collection/probe.hpp"
#include "newsaudit/collection/runner.hpp"
#include "newsaudit/core/error.hpp"
#include "newsaudit/metrics/exposure.hpp"

namespace newsaudit {

struct EngineConfig {
    std::string id;
    std::string kind = "http"; // "http" | "replay"
    std::string endpoint;      // scheme://host[:port]
    std::string path = "/v1/answers";
    std::string model;
    std::string key_env; // default NEWSAUDIT_<ID>_KEY
};

// Everything a run needs. Relative paths are resolved against the config
// file's directory so fixtures stay relocatable.
struct Config {
    std::filesystem::path base_dir;

    std::vector<std::string> topics; // defaults to the built-in 24
    std::vector<EngineConfig> engines;
    std::string baseline_engine;
    std::string persona_mode = "baseline"; // baseline | grid | explicit
    std::vector<collection::Persona> explicit_personas;
    std::string schedule_time = "20:00";
    std::vector<std::string> days; // empty: today (live) or fixture days (replay)
    collection::RetryPolicy retry;
    std::string output_dir;

    std::string replay_fixture; // optional; replay collection from this file
    std::string record_fixture; // optional; tee live answers into this file

    std::string shorteners_file;
    std::string public_suffix_file;
    std::string keep_subdomains_file;
    std::string redirects_fixture; // offline url->url hop map

    std::string mbfc_csv;
    std::string psl_csv;
    std::string iab_overrides_csv;
    std::string iab_cache;

    double rtd_alpha = 1.0 / 3.0;
    std::size_t rtd_top_k = 10;
    metrics::PersonaScope persona_scope = metrics::PersonaScope::baseline_only;
    bool serp_length_sensitivity = true;

    // The personas this run queries. Grid mode includes the baseline persona
    // so the same run carries both conditions; analyses slice by scope.
    std::vector<collection::Persona> personas() const {
        if (persona_mode == "baseline") return {collection::baseline_persona()};
        if (persona_mode == "grid") {
            std::vector<collection::Persona> all = {collection::baseline_persona()};
            const auto grid = collection::persona_grid();
            all.insert(all.end(), grid.begin(), grid.end());
            return all;
        }
        if (persona_mode == "explicit") return explicit_personas;
        throw ConfigError("unknown persona_mode '" + persona_mode + "'");
    }

    std::string resolve(const std::string& path) const {
        if (path.empty()) return path;
        std::filesystem::path p(path);
        if (p.is_absolute()) return p.string();
        return (base_dir / p).lexically_normal().string();
    }
};

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid json: ") + e.what());
    }

    auto require = [&](const char* key) {
        if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
    };

    Config cfg;
    cfg.base_dir = std::filesystem::absolute(std::filesystem::path(path)).parent_path();

    require("engines");
    require("output_dir");
    require("baseline_engine");

    if (j.contains("topics")) cfg.topics = j["topics"].get<std::vector<std::string>>();
    else cfg.topics = collection::default_topics();
    if (cfg.topics.empty()) throw ConfigError("topics list is empty");

    for (const auto& je : j["engines"]) {
        EngineConfig e;
        if (!je.contains("id")) throw ConfigError("engine entry missing 'id'");
        e.id = je["id"].get<std::string>();
        e.kind = je.value("kind", std::string("http"));
        if (e.kind != "http" && e.kind != "replay")
            throw ConfigError("engine '" + e.id + "': unknown kind '" + e.kind + "'");
        e.endpoint = je.value("endpoint", std::string());
        e.path = je.value("path", std::string("/v1/answers"));
        e.model = je.value("model", std::string());
        e.key_env = je.value("key_env", std::string());
        cfg.engines.push_back(std::move(e));
    }
    if (cfg.engines.empty()) throw ConfigError("engines list is empty");

    cfg.baseline_engine = j["baseline_engine"].get<std::string>();
    bool baseline_known = false;
    for (const auto& e : cfg.engines) baseline_known |= (e.id == cfg.baseline_engine);
    if (!baseline_known)
        throw ConfigError("baseline_engine '" + cfg.baseline_engine + "' is not a configured engine");

    cfg.persona_mode = j.value("persona_mode", std::string("baseline"));
    if (cfg.persona_mode != "baseline" && cfg.persona_mode != "grid" &&
        cfg.persona_mode != "explicit")
        throw ConfigError("unknown persona_mode '" + cfg.persona_mode + "'");
    if (j.contains("personas"))
        for (const auto& jp : j["personas"])
            cfg.explicit_personas.push_back(collection::persona_from_json(jp));
    if (cfg.persona_mode == "explicit" && cfg.explicit_personas.empty())
        throw ConfigError("persona_mode 'explicit' requires a 'personas' list");

    cfg.schedule_time = j.value("schedule_time", std::string("20:00"));
    if (j.contains("days")) cfg.days = j["days"].get<std::vector<std::string>>();
    if (j.contains("retry")) {
        cfg.retry.max_attempts = j["retry"].value("max_attempts", 3);
        cfg.retry.backoff = std::chrono::milliseconds(j["retry"].value("backoff_ms", 250));
        if (cfg.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
    }
    cfg.output_dir = cfg.resolve(j["output_dir"].get<std::string>());

    cfg.replay_fixture = cfg.resolve(j.value("replay_fixture", std::string()));
    cfg.record_fixture = cfg.resolve(j.value("record_fixture", std::string()));
    cfg.shorteners_file = cfg.resolve(j.value("shorteners_file", std::string()));
    cfg.public_suffix_file = cfg.resolve(j.value("public_suffix_file", std::string()));
    cfg.keep_subdomains_file = cfg.resolve(j.value("keep_subdomains_file", std::string()));
    cfg.redirects_fixture = cfg.resolve(j.value("redirects_fixture", std::string()));
    cfg.mbfc_csv = cfg.resolve(j.value("mbfc_csv", std::string()));
    cfg.psl_csv = cfg.resolve(j.value("psl_csv", std::string()));
    cfg.iab_overrides_csv = cfg.resolve(j.value("iab_overrides_csv", std::string()));
    cfg.iab_cache = cfg.resolve(j.value("iab_cache", std::string()));

    if (j.contains("rtd")) {
        cfg.rtd_alpha = j["rtd"].value("alpha", 1.0 / 3.0);
        cfg.rtd_top_k = j["rtd"].value("top_k", std::size_t{10});
        if (!(cfg.rtd_alpha > 0.0)) throw ConfigError("rtd.alpha must be > 0");
    }
    if (j.contains("analysis")) {
        const std::string scope = j["analysis"].value("persona_scope", std::string("baseline_only"));
        if (scope == "baseline_only") cfg.persona_scope = metrics::PersonaScope::baseline_only;
        else if (scope == "grid_only") cfg.persona_scope = metrics::PersonaScope::grid_only;
        else if (scope == "all") cfg.persona_scope = metrics::PersonaScope::all;
        else throw ConfigError("unknown analysis.persona_scope '" + scope + "'");
        cfg.serp_length_sensitivity = j["analysis"].value("serp_length_sensitivity", true);
    }
    return cfg;
}

} // namespace newsaudit
