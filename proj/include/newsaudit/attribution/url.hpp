#pragma once

#include <optional>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "newsaudit/core/strings.hpp"

namespace newsaudit::attribution {

// Host component of a URL, lowercased. Tolerates scheme-less input by
// treating everything before the first '/' as the authority. Returns nullopt
// when no plausible host is present.
inline std::optional<std::string> url_host(const std::string& url) {
    std::string_view rest = str::trim(url);
    if (rest.empty()) return std::nullopt;
    if (const auto pos = rest.find("://"); pos != std::string_view::npos) {
        const auto scheme = rest.substr(0, pos);
        if (scheme.empty()) return std::nullopt;
        rest.remove_prefix(pos + 3);
    }
    // authority ends at the first path/query/fragment delimiter
    if (const auto cut = rest.find_first_of("/?#"); cut != std::string_view::npos)
        rest = rest.substr(0, cut);
    if (const auto at = rest.rfind('@'); at != std::string_view::npos)
        rest.remove_prefix(at + 1);
    // strip a :port suffix (IPv6 bracket hosts are rejected below)
    if (const auto colon = rest.rfind(':'); colon != std::string_view::npos) {
        const auto port = rest.substr(colon + 1);
        if (!port.empty() &&
            port.find_first_not_of("0123456789") == std::string_view::npos)
            rest = rest.substr(0, colon);
    }
    if (rest.empty()) return std::nullopt;
    std::string host = str::lower(rest);
    if (host.front() == '.' || host.back() == '.' || host.find("..") != std::string::npos)
        return std::nullopt;
    for (char c : host)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_'))
            return std::nullopt;
    return host;
}

namespace detail {

inline std::string clean_title(std::string_view raw) {
    auto t = str::trim(raw);
    // drop a trailing separator left behind by "Title - (url)" style lines
    while (!t.empty() && (t.back() == '-' || t.back() == ':' || t.back() == ',')) {
        t.remove_suffix(1);
        t = str::trim(t);
    }
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']') t = str::trim(t.substr(1, t.size() - 2));
    while (t.size() >= 4 && str::starts_with(t, "**") && str::ends_with(t, "**"))
        t = str::trim(t.substr(2, t.size() - 4));
    while (t.size() >= 2 && ((t.front() == '*' && t.back() == '*') || (t.front() == '_' && t.back() == '_')))
        t = str::trim(t.substr(1, t.size() - 2));
    return std::string(t);
}

inline std::string strip_trailing_punct(std::string url) {
    while (!url.empty()) {
        const char c = url.back();
        if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == ')' ||
            c == ']' || c == '}' || c == '"' || c == '\'' || c == '>')
            url.pop_back();
        else
            break;
    }
    return url;
}

} // namespace detail

// Parse "- Title (URL)" bullet items in answer order. When the strict bullet
// pattern matches nothing, fall back to harvesting every http(s) URL token in
// reading order (models deviate from the instructed format often enough that
// dropping such answers would bias the audit). Duplicates are kept; order is
// the answer's own.
inline std::vector<std::pair<std::string, std::string>> extract_urls(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> items;
    static const std::regex item_re(R"(^\s*(.*)\(\s*(https?://[^()\s]+)\s*\)[\s.]*$)");

    for (const auto& raw_line : str::split(text, '\n')) {
        std::string_view line = str::trim(raw_line);
        if (line.empty()) continue;
        // bullet markers: "-", "*", "•" (UTF-8 e2 80 a2), or "N." enumerations
        bool bulleted = false;
        if (line.front() == '-' || line.front() == '*') {
            line.remove_prefix(1);
            bulleted = true;
        } else if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xe2 &&
                   static_cast<unsigned char>(line[1]) == 0x80 &&
                   static_cast<unsigned char>(line[2]) == 0xa2) {
            line.remove_prefix(3);
            bulleted = true;
        }
        if (!bulleted) continue;
        std::smatch m;
        const std::string candidate(str::trim(line));
        if (std::regex_match(candidate, m, item_re))
            items.emplace_back(detail::clean_title(m[1].str()), m[2].str());
    }
    if (!items.empty()) return items;

    // lenient fallback: any http(s) token, reading order, untitled
    static const std::regex url_re(R"(https?://[^\s<>()\[\]{}"']+)");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), url_re);
         it != std::sregex_iterator(); ++it)
        items.emplace_back("", detail::strip_trailing_punct(it->str()));
    return items;
}

} // namespace newsaudit::attribution
