#include "agentk/scheduler.hpp"

#include <algorithm>
#include <set>

namespace agentk::scheduler {

const RoutingDecision& validate_routing(const RoutingDecision& decision, std::size_t cap) {
    if (decision.subtasks.empty()) {
        fail(Errc::empty_ensemble, "routing decision has no subtasks");
    }
    if (decision.subtasks.size() > cap) {
        fail(Errc::ensemble_too_large, "ensemble of " + std::to_string(decision.subtasks.size()) +
                                           " exceeds cap " + std::to_string(cap));
    }
    std::set<std::string> ids;
    for (const auto& st : decision.subtasks) {
        if (!ids.insert(st.subagent_id).second) {
            fail(Errc::duplicate_subagent_id, "duplicate subagent id: " + st.subagent_id);
        }
    }
    return decision;
}

const ToolBatch& validate_batch(const ToolBatch& batch, std::size_t cap) {
    if (batch.calls.empty()) {
        fail(Errc::empty_batch, "tool batch has no calls");
    }
    if (batch.calls.size() > cap) {
        fail(Errc::batch_too_large, "batch of " + std::to_string(batch.calls.size()) +
                                        " exceeds cap " + std::to_string(cap));
    }
    for (std::size_t i = 0; i < batch.calls.size(); ++i) {
        if (batch.calls[i].call_index != static_cast<int>(i)) {
            fail(Errc::malformed_indices,
                 "call_index " + std::to_string(batch.calls[i].call_index) + " at position " +
                     std::to_string(i));
        }
    }
    return batch;
}

std::vector<ToolOutcome> dispatch_parallel(const ToolBatch& batch, const ToolRegistry& registry,
                                           const SchedulerConfig& config,
                                           const std::vector<std::string>& allowlist) {
    // Reserve scripted behaviors in index order before running anything.
    std::vector<std::function<ToolResult()>> thunks;
    thunks.reserve(batch.calls.size());
    for (const auto& call : batch.calls) {
        const bool allowed = allowlist.empty() ||
                             std::find(allowlist.begin(), allowlist.end(), call.tool_name) !=
                                 allowlist.end();
        if (!allowed) {
            thunks.push_back([name = call.tool_name]() {
                return ToolResult{false, "", "tool_not_allowed",
                                  "tool not in subtask allowlist: " + name, 0};
            });
            continue;
        }
        auto tool = registry.resolve(call.tool_name);
        if (!tool) {
            thunks.push_back([name = call.tool_name]() {
                return ToolResult{false, "", "unknown_tool", "no such tool: " + name, 0};
            });
            continue;
        }
        thunks.push_back(
            tool->prepare(call.arguments, CallContext{batch.issued_by, batch.round, call.call_index}));
    }

    std::function<ToolOutcome(const ToolCall&, std::size_t)> run =
        [&](const ToolCall& call, std::size_t i) {
            ToolOutcome out;
            out.call_index = call.call_index;
            out.tool_name = call.tool_name;
            ToolResult r;
            try {
                r = thunks[i]();
            } catch (const std::exception& ex) {
                out.ok = false;
                out.error_kind = "tool_failure";
                out.error_message = ex.what();
                out.duration_ms = 0;
                return out;
            }
            if (r.delay_ms > config.tool_timeout_ms) {
                out.ok = false;
                out.error_kind = "timeout";
                out.error_message = "call exceeded " + std::to_string(config.tool_timeout_ms) + " ms";
                out.duration_ms = config.tool_timeout_ms;
                return out;
            }
            out.ok = r.ok;
            out.content = r.content;
            out.error_kind = r.error_kind;
            out.error_message = r.error_message;
            out.duration_ms = r.delay_ms;
            return out;
        };

    return parallel_ordered<ToolCall, ToolOutcome>(batch.calls, run);
}

}  // namespace agentk::scheduler
