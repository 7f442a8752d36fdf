#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsaudit/core/error.hpp"

namespace newsaudit::collection {

enum class Wealth { poor, rich };
enum class Sex { male, female };
enum class Age { young, old };
enum class Ideology { left, right };

// A hypothetical news reader described by up to four binary traits.
// All fields optional; the all-absent persona is the audit baseline.
struct Persona {
    std::optional<Wealth> wealth;
    std::optional<Sex> sex;
    std::optional<Age> age;
    std::optional<Ideology> ideology;

    bool empty() const { return !wealth && !sex && !age && !ideology; }

    // Trait words joined by single spaces in the fixed order
    // wealth, sex, age, ideology. Empty string for the baseline persona.
    std::string trait_string() const {
        std::string out;
        auto add = [&out](const char* word) {
            if (!out.empty()) out += ' ';
            out += word;
        };
        if (wealth) add(*wealth == Wealth::poor ? "poor" : "rich");
        if (sex) add(*sex == Sex::male ? "male" : "female");
        if (age) add(*age == Age::young ? "young" : "old");
        if (ideology) add(*ideology == Ideology::left ? "left" : "right");
        return out;
    }

    bool operator==(const Persona&) const = default;
};

inline nlohmann::ordered_json to_json(const Persona& p) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    if (p.wealth) j["wealth"] = (*p.wealth == Wealth::poor ? "poor" : "rich");
    if (p.sex) j["sex"] = (*p.sex == Sex::male ? "male" : "female");
    if (p.age) j["age"] = (*p.age == Age::young ? "young" : "old");
    if (p.ideology) j["ideology"] = (*p.ideology == Ideology::left ? "left" : "right");
    return j;
}

inline Persona persona_from_json(const nlohmann::ordered_json& j) {
    Persona p;
    if (!j.is_object()) throw LoadError("persona: expected an object");
    for (const auto& [key, value] : j.items()) {
        const std::string v = value.get<std::string>();
        if (key == "wealth") {
            if (v == "poor") p.wealth = Wealth::poor;
            else if (v == "rich") p.wealth = Wealth::rich;
            else throw LoadError("persona: unknown wealth '" + v + "'");
        } else if (key == "sex") {
            if (v == "male") p.sex = Sex::male;
            else if (v == "female") p.sex = Sex::female;
            else throw LoadError("persona: unknown sex '" + v + "'");
        } else if (key == "age") {
            if (v == "young") p.age = Age::young;
            else if (v == "old") p.age = Age::old;
            else throw LoadError("persona: unknown age '" + v + "'");
        } else if (key == "ideology") {
            if (v == "left") p.ideology = Ideology::left;
            else if (v == "right") p.ideology = Ideology::right;
            else throw LoadError("persona: unknown ideology '" + v + "'");
        } else {
            throw LoadError("persona: unknown field '" + key + "'");
        }
    }
    return p;
}

// The empty baseline persona used for the main audit condition.
inline Persona baseline_persona() { return Persona{}; }

// Full Cartesian product of the four binary traits: exactly 16 personas in
// deterministic lexicographic order (wealth slowest, ideology fastest).
inline std::vector<Persona> persona_grid() {
    std::vector<Persona> grid;
    grid.reserve(16);
    for (Wealth w : {Wealth::poor, Wealth::rich})
        for (Sex s : {Sex::male, Sex::female})
            for (Age a : {Age::young, Age::old})
                for (Ideology i : {Ideology::left, Ideology::right})
                    grid.push_back(Persona{w, s, a, i});
    return grid;
}

} // namespace newsaudit::collection
