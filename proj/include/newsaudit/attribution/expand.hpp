#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>

#include <httplib.h>

#include "newsaudit/attribution/url.hpp"
#include "newsaudit/core/error.hpp"
#include "newsaudit/core/strings.hpp"

namespace newsaudit::attribution {

// One redirect hop: final URLs yield nullopt. Implementations must be safe
// for concurrent resolve() calls.
class RedirectResolver {
public:
    virtual ~RedirectResolver() = default;
    virtual std::optional<std::string> resolve(const std::string& url) = 0;
};

// Deterministic resolver backed by an explicit url -> url map. Counts calls
// so tests can assert that non-shortened URLs never touch the resolver.
class FixtureResolver : public RedirectResolver {
public:
    FixtureResolver() = default;
    explicit FixtureResolver(std::map<std::string, std::string> hops) : hops_(std::move(hops)) {}
    FixtureResolver(std::initializer_list<std::pair<const std::string, std::string>> hops)
        : hops_(hops) {}

    std::optional<std::string> resolve(const std::string& url) override {
        std::lock_guard<std::mutex> lock(mutex_);
        ++calls_;
        auto it = hops_.find(url);
        if (it == hops_.end()) return std::nullopt;
        return it->second;
    }

    long calls() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return calls_;
    }

private:
    std::map<std::string, std::string> hops_;
    mutable std::mutex mutex_;
    long calls_ = 0;
};

// Live resolver: issues a non-following GET and reads the Location header.
class HttpRedirectResolver : public RedirectResolver {
public:
    explicit HttpRedirectResolver(int timeout_seconds = 10) : timeout_(timeout_seconds) {}

    std::optional<std::string> resolve(const std::string& url) override {
        if (!url_host(url)) throw TransportError("unresolvable url: " + url);
        const auto scheme_end = url.find("://");
        const std::string scheme = scheme_end == std::string::npos ? "http" : url.substr(0, scheme_end);
        // authority keeps its port for the connection; url_host() strips it
        const std::size_t auth_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        const auto path_start = url.find('/', auth_start);
        const std::string authority = url.substr(
            auth_start, path_start == std::string::npos ? std::string::npos : path_start - auth_start);
        const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        httplib::Client client((scheme + "://" + authority).c_str());
        client.set_follow_location(false);
        client.set_connection_timeout(timeout_, 0);
        client.set_read_timeout(timeout_, 0);
        auto res = client.Get(path.c_str());
        if (!res) throw TransportError("redirect probe failed: " + httplib::to_string(res.error()));
        if (res->status >= 300 && res->status < 400 && res->has_header("Location")) {
            std::string loc = res->get_header_value("Location");
            if (str::starts_with(loc, "/")) loc = scheme + "://" + authority + loc;
            return loc;
        }
        return std::nullopt;
    }

private:
    int timeout_;
};

// Hosts treated as link shorteners / agent redirect services. Configuration
// data, not heuristics: the audit must be able to say exactly which hosts it
// expanded.
inline std::set<std::string> default_shortener_hosts() {
    return {
        "bit.ly",      "t.co",          "goo.gl",   "tinyurl.com", "ow.ly",
        "buff.ly",     "is.gd",         "dlvr.it",  "trib.al",     "rb.gy",
        "shorturl.at", "tiny.cc",       "lnkd.in",  "g.co",
        "vertexaisearch.cloud.google.com", // Gemini grounding redirects
    };
}

struct ExpansionResult {
    std::string url;
    bool failed = false; // hop limit hit or transport failure; url is the original
    int hops = 0;
};

// Expand `url` iff its host is in the shortener list, following redirects up
// to `max_hops`. Anything else passes through untouched without a resolver
// call. Failures keep the original URL and set the flag; attribution records
// them rather than dropping the entry.
inline ExpansionResult expand_url(const std::string& url, RedirectResolver& resolver,
                                  const std::set<std::string>& shortener_hosts,
                                  int max_hops = 5) {
    const auto host = url_host(url);
    if (!host || !shortener_hosts.count(*host)) return {url, false, 0};

    std::string current = url;
    for (int hop = 0; hop < max_hops; ++hop) {
        std::optional<std::string> next;
        try {
            next = resolver.resolve(current);
        } catch (const std::exception&) {
            return {url, true, hop};
        }
        if (!next) return {current, false, hop};
        current = *next;
    }
    // still redirecting after max_hops: treat as a cycle / overlong chain
    return {url, true, max_hops};
}

} // namespace newsaudit::attribution
