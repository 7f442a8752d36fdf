#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "newsaudit/attribution/url.hpp"
#include "newsaudit/core/error.hpp"
#include "newsaudit/core/strings.hpp"

namespace newsaudit::attribution {

// Public-suffix rules in the publicsuffix.org format: plain rules, "*."
// wildcards, "!" exceptions. A compact embedded seed covers the common
// registries; pass a full snapshot file for production runs.
class PublicSuffixList {
public:
    PublicSuffixList() = default;

    static PublicSuffixList embedded_default() {
        PublicSuffixList psl;
        static const char* rules[] = {
            "com", "org", "net", "gov", "edu", "mil", "int", "info", "biz", "io", "ai",
            "co", "tv", "me", "us", "news", "blog", "online", "site", "app", "dev",
            "de", "fr", "it", "es", "nl", "be", "ch", "at", "se", "no", "dk", "fi",
            "pl", "ro", "gr", "pt", "cz", "hu", "ie", "tr", "ru", "ua", "il", "ae",
            "cn", "jp", "kr", "in", "pk", "id", "sg", "hk", "tw", "th", "my", "ph",
            "au", "nz", "br", "mx", "ar", "cl", "za", "ng", "ke", "eg", "ca", "uk", "eu",
            "qa", "sa",
            "co.uk", "org.uk", "ac.uk", "gov.uk", "net.uk", "me.uk", "ltd.uk", "plc.uk",
            "com.au", "net.au", "org.au", "gov.au", "edu.au",
            "com.br", "org.br", "gov.br", "com.mx", "gob.mx",
            "com.cn", "org.cn", "gov.cn", "com.tr", "org.tr", "gov.tr",
            "co.jp", "or.jp", "go.jp", "co.kr", "or.kr", "co.in", "org.in", "gov.in",
            "com.pk", "org.pk", "com.sg", "com.hk", "co.il", "org.il", "co.za", "org.za",
            "com.ar", "com.eg", "com.ph", "com.my", "co.nz", "org.nz", "com.qa", "com.sa",
        };
        for (const char* r : rules) psl.rules_.insert(r);
        return psl;
    }

    static PublicSuffixList from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open public suffix file: " + path);
        PublicSuffixList psl;
        std::string line;
        while (std::getline(in, line)) {
            auto t = std::string(str::trim(line));
            if (t.empty() || str::starts_with(t, "//") || str::starts_with(t, "#")) continue;
            psl.add_rule(t);
        }
        return psl;
    }

    void add_rule(const std::string& rule) {
        if (str::starts_with(rule, "!")) exceptions_.insert(str::lower(rule.substr(1)));
        else if (str::starts_with(rule, "*.")) wildcards_.insert(str::lower(rule.substr(2)));
        else rules_.insert(str::lower(rule));
    }

    bool empty() const { return rules_.empty() && wildcards_.empty() && exceptions_.empty(); }

    // Registrable domain: public suffix plus one label. Hosts that *are* a
    // public suffix come back unchanged.
    std::string registrable_domain(const std::string& host) const {
        const auto labels = str::split(host, '.');
        const std::size_t n = labels.size();
        if (n <= 1) return host;

        // longest matching suffix, checked label-aligned from each position
        std::size_t suffix_labels = 1; // implicit "*" rule: rightmost label
        for (std::size_t start = 0; start < n; ++start) {
            std::string candidate = labels[start];
            for (std::size_t k = start + 1; k < n; ++k) candidate += "." + labels[k];
            const std::size_t len = n - start;
            if (exceptions_.count(candidate)) {
                // exception rule: the suffix is the candidate minus its first label
                suffix_labels = len - 1;
                break;
            }
            if (rules_.count(candidate)) {
                suffix_labels = std::max(suffix_labels, len);
            }
            if (len >= 2) {
                // wildcard "*.base" matches candidate = <label>.base
                std::string base = labels[start + 1];
                for (std::size_t k = start + 2; k < n; ++k) base += "." + labels[k];
                if (wildcards_.count(base)) suffix_labels = std::max(suffix_labels, len);
            }
        }
        if (suffix_labels >= n) return host;
        const std::size_t keep = suffix_labels + 1;
        std::string out = labels[n - keep];
        for (std::size_t k = n - keep + 1; k < n; ++k) out += "." + labels[k];
        return out;
    }

private:
    std::set<std::string> rules_;
    std::set<std::string> wildcards_;
    std::set<std::string> exceptions_;
};

// Shared normalization policy for attribution and dataset joins.
struct NormalizationRules {
    PublicSuffixList psl = PublicSuffixList::embedded_default();
    // Hosts under these bases keep their full hostname instead of being
    // reduced (wikipedia.org by default, so en.wikipedia.org survives).
    std::set<std::string> keep_subdomains = {"wikipedia.org"};

    static NormalizationRules defaults() { return {}; }
};

inline std::set<std::string> load_host_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open host list: " + path);
    std::set<std::string> hosts;
    std::string line;
    while (std::getline(in, line)) {
        auto t = std::string(str::trim(line));
        if (t.empty() || str::starts_with(t, "#")) continue;
        hosts.insert(str::lower(t));
    }
    return hosts;
}

// Normalize a bare hostname: lowercase, strip one leading "www.", reduce to
// the registrable domain unless a keep-subdomain exception applies.
inline std::string normalize_host(const std::string& raw_host, const NormalizationRules& rules) {
    std::string host = str::lower(str::trim(raw_host));
    if (str::starts_with(host, "www.") && host.size() > 4) host = host.substr(4);
    if (host.empty()) throw ParameterError("normalize_host: empty host");
    for (const auto& base : rules.keep_subdomains)
        if (str::host_under(host, base)) return host;
    return rules.psl.registrable_domain(host);
}

// Normalize a URL to its outlet domain. Throws ParameterError when the URL
// has no parseable host; attribute() turns that into a per-entry error.
inline std::string normalize_domain(const std::string& url, const NormalizationRules& rules) {
    const auto host = url_host(url);
    if (!host) throw ParameterError("normalize_domain: no parseable host in '" + url + "'");
    return normalize_host(*host, rules);
}

} // namespace newsaudit::attribution
