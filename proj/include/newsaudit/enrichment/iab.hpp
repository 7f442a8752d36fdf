#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>

#include "newsaudit/core/error.hpp"
#include "newsaudit/core/jsonl.hpp"

namespace newsaudit::enrichment {

// IAB Content Taxonomy 3.0, top level: 27 categories.
inline const std::set<std::string>& iab_categories() {
    static const std::set<std::string> cats = {
        "Adult",
        "Arts & Entertainment",
        "Autos & Vehicles",
        "Beauty & Fitness",
        "Books & Literature",
        "Business & Industrial",
        "Computers & Electronics",
        "Finance",
        "Food & Drink",
        "Games",
        "Health",
        "Hobbies & Leisure",
        "Home & Garden",
        "Internet & Telecom",
        "Jobs & Education",
        "Law & Government",
        "News",
        "Online Communities",
        "People & Society",
        "Pets & Animals",
        "Real Estate",
        "Reference",
        "Science",
        "Sensitive Subjects",
        "Shopping",
        "Sports",
        "Travel",
    };
    return cats;
}

inline constexpr double kIabConfidenceThreshold = 0.50;

struct IabAnswer {
    std::string category;
    double confidence = 0.0;
};

// Category provider (live Klazify-style client or a test fixture). Returning
// nullopt means the provider classified the domain as null.
class IabProvider {
public:
    virtual ~IabProvider() = default;
    virtual std::optional<IabAnswer> categorize(const std::string& domain) = 0;
};

class FixtureIabProvider : public IabProvider {
public:
    explicit FixtureIabProvider(std::map<std::string, IabAnswer> answers)
        : answers_(std::move(answers)) {}

    std::optional<IabAnswer> categorize(const std::string& domain) override {
        ++calls_;
        auto it = answers_.find(domain);
        if (it == answers_.end()) return std::nullopt;
        return it->second;
    }

    long calls() const { return calls_; }

private:
    std::map<std::string, IabAnswer> answers_;
    long calls_ = 0;
};

// Persistent raw-result cache: one {domain, category, confidence, fetched_at}
// line per provider call, nulls included, so a warm rerun issues zero calls.
class IabCache {
public:
    IabCache() = default;

    // Binds to (and preloads from) a cache file; an empty path keeps the
    // cache in-memory only.
    explicit IabCache(const std::string& path) : path_(path) {
        if (!path.empty() && std::filesystem::exists(path)) {
            jsonl::for_each(path, [&](jsonl::json& obj, long) {
                CachedResult r;
                r.is_null = obj.at("category").is_null();
                if (!r.is_null) {
                    r.answer.category = obj.at("category").get<std::string>();
                    r.answer.confidence = obj.at("confidence").get<double>();
                }
                r.fetched_at = obj.value("fetched_at", "");
                entries_[obj.at("domain").get<std::string>()] = std::move(r);
            });
        }
    }

    struct CachedResult {
        bool is_null = false;
        IabAnswer answer;
        std::string fetched_at;
    };

    std::optional<CachedResult> find(const std::string& domain) const {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = entries_.find(domain);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void put(const std::string& domain, const std::optional<IabAnswer>& answer,
             const std::string& fetched_at) {
        std::lock_guard<std::mutex> lock(mutex_);
        CachedResult r;
        r.is_null = !answer.has_value();
        if (answer) r.answer = *answer;
        r.fetched_at = fetched_at;
        entries_[domain] = r;
        if (!path_.empty()) {
            jsonl::Writer writer(path_);
            nlohmann::ordered_json j;
            j["domain"] = domain;
            if (answer) {
                j["category"] = answer->category;
                j["confidence"] = answer->confidence;
            } else {
                j["category"] = nullptr;
                j["confidence"] = nullptr;
            }
            j["fetched_at"] = fetched_at;
            writer.write(j);
        }
    }

private:
    std::string path_; // empty = in-memory only
    std::map<std::string, CachedResult> entries_;
    mutable std::mutex mutex_;
};

struct IabResult {
    std::optional<std::string> category;
    std::optional<double> confidence;
    bool retryable_failure = false; // transport trouble, try again later
};

// Override file wins; then the persistent cache; then the provider. Provider
// answers count only at confidence >= 0.50 and only within the 27-category
// vocabulary, but the raw answer is cached either way.
inline IabResult categorize_iab(const std::string& domain, IabProvider* provider,
                                const std::map<std::string, std::string>& overrides,
                                IabCache& cache, const std::string& now = "") {
    IabResult result;
    if (auto it = overrides.find(domain); it != overrides.end()) {
        result.category = it->second;
        result.confidence = 1.0; // manual categorization
        return result;
    }

    std::optional<IabCache::CachedResult> cached = cache.find(domain);
    if (!cached) {
        if (!provider) return result;
        std::optional<IabAnswer> answer;
        try {
            answer = provider->categorize(domain);
        } catch (const std::exception&) {
            result.retryable_failure = true;
            return result;
        }
        cache.put(domain, answer, now);
        cached = cache.find(domain);
    }

    if (cached->is_null) return result;
    if (cached->answer.confidence >= kIabConfidenceThreshold &&
        iab_categories().count(cached->answer.category)) {
        result.category = cached->answer.category;
        result.confidence = cached->answer.confidence;
    }
    return result;
}

} // namespace newsaudit::enrichment
