#pragma once

#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "newsaudit/collection/probe.hpp"
#include "newsaudit/core/error.hpp"
#include "newsaudit/core/jsonl.hpp"

namespace newsaudit::collection {

struct AgentResponse {
    std::string text;
    std::string fetched_at;
    std::map<std::string, std::string> meta;
};

// One search engine behind a uniform interface: live HTTP, replay, or a test
// double. Implementations must be safe for concurrent respond() calls.
class SearchAgent {
public:
    virtual ~SearchAgent() = default;
    virtual AgentResponse respond(const ProbeSpec& probe) = 0;
};

// Read-only after construction; shared across collection worker threads.
class AgentRegistry {
public:
    void add(const std::string& engine_id, std::shared_ptr<SearchAgent> agent) {
        agents_[engine_id] = std::move(agent);
    }

    bool has(const std::string& engine_id) const { return agents_.count(engine_id) > 0; }

    SearchAgent& get(const std::string& engine_id) const {
        auto it = agents_.find(engine_id);
        if (it == agents_.end())
            throw ConfigError("no agent registered for engine '" + engine_id + "'");
        return *it->second;
    }

    std::vector<std::string> engine_ids() const {
        std::vector<std::string> ids;
        ids.reserve(agents_.size());
        for (const auto& [id, _] : agents_) ids.push_back(id);
        return ids;
    }

private:
    std::map<std::string, std::shared_ptr<SearchAgent>> agents_;
};

// Replays byte-identical answers from a recorded fixture. The fixture file is
// raw-answer-store shaped, so a recorded run replays without conversion.
class ReplayAgent : public SearchAgent {
public:
    explicit ReplayAgent(const std::string& fixture_path) {
        jsonl::for_each(fixture_path, [&](jsonl::json& obj, long lineno) {
            RawAnswer a;
            try {
                a = raw_answer_from_json(obj);
            } catch (const std::exception& e) {
                throw LoadError(fixture_path, lineno, e.what());
            }
            entries_[a.probe.key()] = std::move(a);
        });
    }

    AgentResponse respond(const ProbeSpec& probe) override {
        auto it = entries_.find(probe.key());
        if (it == entries_.end())
            throw FixtureMissError(probe.engine_id + "/" + probe.topic + "/" +
                                   (probe.persona.empty() ? "baseline" : probe.persona.trait_string()) +
                                   "/" + probe.day);
        AgentResponse r;
        r.text = it->second.text;
        r.fetched_at = it->second.fetched_at;
        r.meta = it->second.transport_meta;
        return r;
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, RawAnswer> entries_;
};

// Wraps a live agent and appends every answer to a fixture file.
class RecordingAgent : public SearchAgent {
public:
    RecordingAgent(std::shared_ptr<SearchAgent> inner, std::shared_ptr<jsonl::Writer> sink)
        : inner_(std::move(inner)), sink_(std::move(sink)) {}

    AgentResponse respond(const ProbeSpec& probe) override {
        AgentResponse r = inner_->respond(probe);
        RawAnswer a{probe, r.text, r.fetched_at, r.meta};
        {
            std::lock_guard<std::mutex> lock(mutex_);
            sink_->write(raw_answer_to_json(a));
        }
        return r;
    }

private:
    std::shared_ptr<SearchAgent> inner_;
    std::shared_ptr<jsonl::Writer> sink_;
    std::mutex mutex_;
};

// Environment variable carrying the API key for an engine:
// NEWSAUDIT_<ENGINE>_KEY with non-alphanumerics mapped to '_'.
inline std::string credential_env_name(const std::string& engine_id) {
    std::string name = "NEWSAUDIT_";
    for (char c : engine_id)
        name += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c)) : '_';
    name += "_KEY";
    return name;
}

struct HttpAgentConfig {
    std::string engine_id;
    std::string base_url;   // scheme://host[:port]
    std::string path = "/v1/answers";
    std::string model;      // forwarded verbatim in the request body
    std::string key_env;    // defaults to credential_env_name(engine_id)
    int timeout_seconds = 60;
    // Locale hints travel as connector configuration, never inside prompts.
    std::string language = "en";
    std::string location = "US";
};

// Generic JSON-over-HTTP connector: POSTs {model, system, user, language,
// location} and expects {"text": "..."} back. Engine-specific adapters can
// subclass SearchAgent directly when a provider needs a different body shape.
class HttpChatAgent : public SearchAgent {
public:
    explicit HttpChatAgent(HttpAgentConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.key_env.empty()) cfg_.key_env = credential_env_name(cfg_.engine_id);
    }

    AgentResponse respond(const ProbeSpec& probe) override {
        httplib::Client client(cfg_.base_url);
        client.set_connection_timeout(cfg_.timeout_seconds, 0);
        client.set_read_timeout(cfg_.timeout_seconds, 0);
        httplib::Headers headers;
        if (const char* key = std::getenv(cfg_.key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);
        nlohmann::ordered_json body;
        body["model"] = cfg_.model;
        body["system"] = probe.system_prompt;
        body["user"] = probe.user_prompt;
        body["language"] = cfg_.language;
        body["location"] = cfg_.location;

        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post(cfg_.path, headers, body.dump(), "application/json");
        if (!res) throw TransportError("http transport failed: " + httplib::to_string(res.error()));
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        if (res->status < 200 || res->status >= 300)
            throw TransportError("http status " + std::to_string(res->status));

        AgentResponse r;
        try {
            auto parsed = nlohmann::ordered_json::parse(res->body);
            r.text = parsed.at("text").get<std::string>();
            if (parsed.contains("model")) r.meta["model"] = parsed["model"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("bad response body: ") + e.what());
        }
        r.fetched_at = now_utc_iso();
        r.meta["status"] = std::to_string(res->status);
        r.meta["latency_ms"] = std::to_string(elapsed);
        if (!r.meta.count("model")) r.meta["model"] = cfg_.model;
        return r;
    }

    static std::string now_utc_iso() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

private:
    HttpAgentConfig cfg_;
};

} // namespace newsaudit::collection
