#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agentk/clock.hpp"
#include "agentk/config.hpp"
#include "agentk/ledger.hpp"
#include "agentk/memory.hpp"
#include "agentk/model.hpp"
#include "agentk/scheduler.hpp"
#include "agentk/tools.hpp"
#include "agentk/trace.hpp"

namespace agentk::runtime {

struct SubagentSummary {
    std::string subagent_id;
    std::string text;
    std::string status;  // "ok" | "rejected" | "round_limit_exceeded" | "error"
    bool mechanical_fallback = false;
    std::string result_text;  // verified candidate, when one exists
};

struct WorkerOutput {
    SubagentSummary summary;
    TraceFragment fragment;
    std::int64_t elapsed_ms = 0;
};

struct RunResult {
    FinalAnswer answer;
    Trace trace;
    bool round_limit_exceeded = false;
    int main_rounds = 0;
};

/// Execution state of one subagent; owns its ledger and event buffer
/// exclusively until the join point.
struct WorkerContext {
    std::string id;
    std::string subtask_prompt;
    std::vector<std::string> tool_allowlist;
    int main_round = 0;
    const KernelConfig* config = nullptr;
    ledger::Ledger ledger;
    VirtualClock clock;
    TraceFragment events;
    int round = 0;
    std::string candidate;
    bool has_candidate = false;

    WorkerContext(const KernelConfig& cfg, std::string subagent_id)
        : id(std::move(subagent_id)), config(&cfg), ledger(cfg.ledger, id) {}

    void emit(const std::string& kind, json payload);
    std::size_t render_budget() const;
};

/// When enabled, makes exactly one reason-role call and returns the note
/// plus the raw reply for tracing; disabled runs make no call at all.
std::optional<std::pair<IntentNote, ModelReply>> optional_reasoning(
    const Task& task, ModelBackend& model, bool enabled, const std::vector<std::string>& context);

/// Consults the verifier on the worker's candidate result. A retry verdict
/// with no rounds remaining is coerced to rejected; the event is recorded
/// in the worker fragment either way.
VerificationOutcome verify_subagent(WorkerContext& ctx, ModelBackend& model);

/// Produces the summary that replaces the worker transcript in the main
/// context. Falls back to mechanical head+tail extraction (flagged) when
/// the summarize role is unavailable or malformed.
SubagentSummary summarize_subagent(WorkerContext& ctx, ModelBackend& model,
                                   const std::string& status);

struct AggregateOutcome {
    FinalAnswer answer;
    ModelReply reply;
};

AggregateOutcome aggregate_results(const std::vector<SubagentSummary>& summaries,
                                   ModelBackend& model);

WorkerOutput run_worker(const scheduler::Subtask& subtask, int main_round,
                        const KernelConfig& config, ModelBackend& model,
                        const ToolRegistry& tools, ledger::Summarizer& summarizer,
                        std::int64_t start_ms);

/// The end-to-end pipeline: memory load, optional reasoning, the routing
/// loop with parallel workers, aggregation and the single memory
/// write-back phase. Always yields a trace; hitting the main round cap
/// produces a best-effort answer with confidence 0 instead of aborting.
RunResult run_task(const Task& task, const KernelConfig& config, ModelBackend& model,
                   const ToolRegistry& tools, memory::MemoryStore& memory,
                   ledger::Summarizer& summarizer);

}  // namespace agentk::runtime
