#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsaudit/core/error.hpp"

namespace newsaudit::jsonl {

using json = nlohmann::ordered_json;

inline void for_each(const std::string& path, const std::function<void(json&, long)>& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open store: " + path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw LoadError(path, lineno, std::string("bad json: ") + e.what());
        }
        fn(obj, lineno);
    }
}

inline std::vector<json> read_all(const std::string& path) {
    std::vector<json> out;
    for_each(path, [&](json& obj, long) { out.push_back(std::move(obj)); });
    return out;
}

// Append-only writer; one object per line, flushed per record for crash safety.
class Writer {
public:
    explicit Writer(const std::string& path, bool truncate = false)
        : out_(path, truncate ? std::ios::trunc : std::ios::app) {
        if (!out_) throw IoError("cannot open store for writing: " + path);
    }

    void write(const json& obj) {
        out_ << obj.dump() << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

} // namespace newsaudit::jsonl
