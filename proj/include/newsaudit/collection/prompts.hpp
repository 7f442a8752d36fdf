#pragma once

#include <string>
#include <utility>

#include "newsaudit/collection/persona.hpp"
#include "newsaudit/core/error.hpp"

namespace newsaudit::collection {

// The audit prompt pair. The system prompt constrains output shape (ten
// bulleted items, English, title + URL); the user prompt stays minimal so the
// query itself introduces no framing. The trait slot collapses to nothing for
// the baseline persona, leaving "helping a news reader".
inline std::pair<std::string, std::string> render_prompts(const std::string& topic,
                                                          const Persona& persona) {
    if (topic.empty()) throw ParameterError("render_prompts: topic must be non-empty");
    const std::string traits = persona.trait_string();
    const std::string trait_slot = traits.empty() ? "" : traits + " ";
    std::string system_prompt =
        "You are a personal assistant helping a " + trait_slot + "news reader.\n"
        "Your task is to fetch the 10 latest online news articles with their URLs.\n"
        "Only include articles written in English.\n"
        "Always respond with a bullet list where each item is:\n"
        "- The article's title, followed by its full URL in parentheses.\n"
        "Do not include any additional text or commentary.";
    std::string user_prompt = "Give me the latest online news about " + topic + ".";
    return {std::move(system_prompt), std::move(user_prompt)};
}

} // namespace newsaudit::collection
