#pragma once

#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "newsaudit/collection/agents.hpp"
#include "newsaudit/collection/probe.hpp"
#include "newsaudit/core/error.hpp"

namespace newsaudit::collection {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff{250}; // doubled after each failed attempt
};

struct CollectionFailure {
    ProbeSpec probe;
    std::string error;
    int attempts = 0;
};

struct CollectionOutcome {
    std::vector<RawAnswer> answers;
    std::vector<CollectionFailure> failures;
};

// Dispatch a topic-grouped plan: engines run concurrently within one topic,
// topics proceed strictly in order, and each topic's answers are handed to
// the (serialized) sink before the next topic starts. Every probe ends up as
// exactly one answer or one recorded failure.
inline CollectionOutcome
run_collection(const std::vector<ProbeSpec>& plan, const AgentRegistry& agents,
               const RetryPolicy& retry = {},
               const std::function<void(const RawAnswer&)>& persist = nullptr) {
    // Registry misses abort before any agent call.
    for (const auto& probe : plan)
        if (!agents.has(probe.engine_id))
            throw ConfigError("plan references unregistered engine '" + probe.engine_id + "'");

    CollectionOutcome outcome;
    if (plan.empty()) return outcome;

    struct Slot {
        std::optional<RawAnswer> answer;
        std::optional<CollectionFailure> failure;
    };

    std::size_t begin = 0;
    while (begin < plan.size()) {
        std::size_t end = begin;
        while (end < plan.size() && plan[end].topic == plan[begin].topic) ++end;

        std::vector<Slot> slots(end - begin);
        std::vector<std::thread> workers;
        workers.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            workers.emplace_back([&, i] {
                const ProbeSpec& probe = plan[i];
                Slot& slot = slots[i - begin];
                SearchAgent& agent = agents.get(probe.engine_id);
                int attempt = 0;
                auto backoff = retry.backoff;
                while (true) {
                    ++attempt;
                    try {
                        AgentResponse r = agent.respond(probe);
                        slot.answer = RawAnswer{probe, std::move(r.text), std::move(r.fetched_at),
                                                std::move(r.meta)};
                        return;
                    } catch (const TransportError& e) {
                        if (attempt >= retry.max_attempts) {
                            slot.failure = CollectionFailure{probe, e.what(), attempt};
                            return;
                        }
                        if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
                        backoff *= 2;
                    } catch (const std::exception& e) {
                        // Deterministic errors (fixture miss, protocol bugs) are not retried.
                        slot.failure = CollectionFailure{probe, e.what(), attempt};
                        return;
                    }
                }
            });
        }
        for (auto& w : workers) w.join();

        // Persist this topic's answers in plan order before moving on.
        for (auto& slot : slots) {
            if (slot.answer) {
                if (persist) persist(*slot.answer);
                outcome.answers.push_back(std::move(*slot.answer));
            } else {
                outcome.failures.push_back(std::move(*slot.failure));
            }
        }
        begin = end;
    }
    return outcome;
}

} // namespace newsaudit::collection
