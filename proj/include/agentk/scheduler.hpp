#pragma once

#include <cstdint>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "agentk/common.hpp"
#include "agentk/tools.hpp"

namespace agentk::scheduler {

struct Subtask {
    std::string subagent_id;
    std::string prompt;
    std::vector<std::string> tool_allowlist;  // empty = all tools allowed
};

/// Macro-level routing output: how many workers to run and on what.
struct RoutingDecision {
    std::vector<Subtask> subtasks;
    std::string rationale;
};

struct ToolCall {
    int call_index = 0;
    std::string tool_name;
    json arguments;
};

/// Micro-level dispatch unit: the calls one worker issues in one round.
struct ToolBatch {
    std::vector<ToolCall> calls;
    std::string issued_by;
    int round = 0;
};

struct SchedulerConfig {
    std::size_t ensemble_cap = 8;
    std::size_t batch_cap = 5;
    std::int64_t tool_timeout_ms = 30000;
};

/// Bounds check only; the complexity judgment behind the decision belongs
/// to the planner model.
const RoutingDecision& validate_routing(const RoutingDecision& decision, std::size_t cap);

const ToolBatch& validate_batch(const ToolBatch& batch, std::size_t cap = 5);

struct ToolOutcome {
    int call_index = 0;
    std::string tool_name;
    bool ok = false;
    std::string content;
    std::string error_kind;
    std::string error_message;
    std::int64_t duration_ms = 0;
};

/// Runs every call of a validated batch concurrently and returns exactly
/// |calls| outcomes ordered by call_index, whatever the completion order.
/// A call failure (unknown tool, timeout, thrown error) becomes an error
/// outcome and never aborts its siblings.
std::vector<ToolOutcome> dispatch_parallel(const ToolBatch& batch, const ToolRegistry& registry,
                                           const SchedulerConfig& config,
                                           const std::vector<std::string>& allowlist = {});

/// Bounded parallel map with a deterministic, index-ordered join. Items run
/// in waves of at most max_parallel (0 = all at once).
template <typename T, typename R>
std::vector<R> parallel_ordered(const std::vector<T>& items,
                                const std::function<R(const T&, std::size_t)>& fn,
                                std::size_t max_parallel = 0) {
    std::vector<R> out;
    out.resize(items.size());
    if (items.empty()) return out;
    const std::size_t wave = max_parallel == 0 ? items.size() : max_parallel;
    for (std::size_t base = 0; base < items.size(); base += wave) {
        const std::size_t end = std::min(base + wave, items.size());
        std::vector<std::future<R>> futs;
        futs.reserve(end - base);
        for (std::size_t i = base; i < end; ++i) {
            futs.push_back(std::async(std::launch::async, fn, std::cref(items[i]), i));
        }
        for (std::size_t i = base; i < end; ++i) {
            out[i] = futs[i - base].get();
        }
    }
    return out;
}

/// Executes one worker per subtask in parallel; results come back in
/// declaration order. The worker callable owns failure containment —
/// anything it throws is treated as a harness failure and propagates.
template <typename R>
std::vector<R> run_ensemble(const RoutingDecision& decision,
                            const std::function<R(const Subtask&, std::size_t)>& worker) {
    return parallel_ordered<Subtask, R>(decision.subtasks, worker);
}

}  // namespace agentk::scheduler
