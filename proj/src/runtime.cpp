#include "agentk/runtime.hpp"

#include <algorithm>
#include <sstream>

namespace agentk::runtime {

namespace {

json summary_to_json(const SubagentSummary& s) {
    return json{{"subagent", s.subagent_id},
                {"status", s.status},
                {"mechanical_fallback", s.mechanical_fallback},
                {"chars", s.text.size()},
                {"text", s.text}};
}

std::string outcome_content(const scheduler::ToolOutcome& oc) {
    if (oc.ok) return oc.content;
    return "[tool-error " + oc.error_kind + "] " + oc.error_message;
}

std::string sub_query_of(const json& args) {
    if (args.is_object() && args.contains("query") && args.at("query").is_string()) {
        return args.at("query").get<std::string>();
    }
    return args.dump();
}

/// Mirrors every summarizer call into the worker fragment so a replay can
/// reproduce tier-2/3 output without the original scenario.
class TracingSummarizer final : public ledger::Summarizer {
public:
    TracingSummarizer(ledger::Summarizer& inner, WorkerContext& ctx) : inner_(inner), ctx_(ctx) {}

    std::optional<std::string> summarize(const Request& request) override {
        auto out = inner_.summarize(request);
        ctx_.emit("summarizer_call", json{{"purpose", request.purpose},
                                          {"owner", request.owner},
                                          {"round", request.round},
                                          {"cap", request.cap},
                                          {"available", out.has_value()},
                                          {"output", out.has_value() ? *out : ""}});
        return out;
    }

private:
    ledger::Summarizer& inner_;
    WorkerContext& ctx_;
};

}  // namespace

void WorkerContext::emit(const std::string& kind, json payload) {
    events.push_back(PendingEvent{clock.now_ms(), kind, std::move(payload)});
}

std::size_t WorkerContext::render_budget() const {
    return config->ledger.tau_context + config->ledger.summary_cap;
}

std::optional<std::pair<IntentNote, ModelReply>> optional_reasoning(
    const Task& task, ModelBackend& model, bool enabled, const std::vector<std::string>& context) {
    if (!enabled) return std::nullopt;
    (void)task;
    ModelReply reply = model.complete(ModelRequest{Role::reason, 0, "", context});
    auto note = parse_reason(reply.payload);
    if (!note) fail(Errc::scenario_mismatch, "unparseable reason reply");
    return std::make_pair(*note, reply);
}

VerificationOutcome verify_subagent(WorkerContext& ctx, ModelBackend& model) {
    std::vector<std::string> context = ctx.ledger.render_context(ctx.render_budget());
    context.push_back("candidate result: " + ctx.candidate);
    ModelReply reply =
        model.complete(ModelRequest{Role::verify, ctx.round, ctx.id, std::move(context)});
    ctx.clock.advance_ms(reply.latency_ms);
    ctx.emit("model_call", json{{"role", "verify"},
                                {"round", ctx.round},
                                {"subagent", ctx.id},
                                {"latency_ms", reply.latency_ms},
                                {"reply", reply.payload}});

    auto parsed = parse_verify(reply.payload);
    VerificationOutcome outcome;
    bool coerced = false;
    if (!parsed) {
        outcome.kind = VerificationOutcome::Kind::rejected;
        outcome.note = "unparseable verification reply";
    } else {
        outcome = *parsed;
    }
    const bool rounds_remain = ctx.round + 1 <= ctx.config->runtime.rounds_worker;
    if (outcome.kind == VerificationOutcome::Kind::retry_with_note && !rounds_remain) {
        outcome.kind = VerificationOutcome::Kind::rejected;
        coerced = true;
    }
    ctx.emit("verify", json{{"subagent", ctx.id},
                            {"round", ctx.round},
                            {"outcome", verification_name(outcome.kind)},
                            {"note", outcome.note},
                            {"coerced", coerced}});
    return outcome;
}

SubagentSummary summarize_subagent(WorkerContext& ctx, ModelBackend& model,
                                   const std::string& status) {
    SubagentSummary summary;
    summary.subagent_id = ctx.id;
    summary.status = status;
    if (status == "ok") summary.result_text = ctx.candidate;

    std::ostringstream transcript;
    for (const auto& msg : ctx.ledger.render_context(ctx.render_budget())) {
        transcript << msg << '\n';
    }
    transcript << "status: " << status;

    const std::size_t cap = ctx.config->ledger.summary_cap;
    try {
        std::vector<std::string> context{transcript.str()};
        ModelReply reply =
            model.complete(ModelRequest{Role::summarize, ctx.round, ctx.id, std::move(context)});
        ctx.clock.advance_ms(reply.latency_ms);
        ctx.emit("model_call", json{{"role", "summarize"},
                                    {"round", ctx.round},
                                    {"subagent", ctx.id},
                                    {"latency_ms", reply.latency_ms},
                                    {"reply", reply.payload}});
        auto text = parse_summary(reply.payload);
        if (!text) {
            summary.mechanical_fallback = true;
            summary.text = ledger::MechanicalSummarizer::head_tail(transcript.str(), cap);
        } else {
            summary.text = std::move(*text);
            if (summary.text.size() > cap) summary.text.resize(cap);
        }
    } catch (const KernelError& err) {
        if (err.code() != Errc::backend_unavailable) throw;
        summary.mechanical_fallback = true;
        summary.text = ledger::MechanicalSummarizer::head_tail(transcript.str(), cap);
    }

    ctx.emit("worker_summary", summary_to_json(summary));
    return summary;
}

AggregateOutcome aggregate_results(const std::vector<SubagentSummary>& summaries,
                                   ModelBackend& model) {
    if (summaries.empty()) fail(Errc::empty_ensemble, "no subagent summaries to aggregate");
    std::vector<std::string> context;
    context.reserve(summaries.size());
    for (const auto& s : summaries) {
        context.push_back("summary[" + s.subagent_id + "," + s.status + "]: " + s.text);
    }
    AggregateOutcome out;
    out.reply = model.complete(ModelRequest{Role::aggregate, 0, "", std::move(context)});
    auto parsed = parse_aggregate(out.reply.payload);
    if (!parsed) fail(Errc::scenario_mismatch, "unparseable aggregate reply");
    out.answer.answer = parsed->answer;
    out.answer.confidence = std::clamp(parsed->confidence, 0.0, 1.0);
    for (const auto& s : summaries) {
        if (std::find(out.answer.contributing_subagents.begin(),
                      out.answer.contributing_subagents.end(),
                      s.subagent_id) == out.answer.contributing_subagents.end()) {
            out.answer.contributing_subagents.push_back(s.subagent_id);
        }
    }
    return out;
}

WorkerOutput run_worker(const scheduler::Subtask& subtask, int main_round,
                        const KernelConfig& config, ModelBackend& model,
                        const ToolRegistry& tools, ledger::Summarizer& summarizer,
                        std::int64_t start_ms) {
    WorkerContext ctx(config, subtask.subagent_id);
    ctx.subtask_prompt = subtask.prompt;
    ctx.tool_allowlist = subtask.tool_allowlist;
    ctx.main_round = main_round;
    ctx.clock = VirtualClock(start_ms);
    TracingSummarizer tsum(summarizer, ctx);

    ctx.emit("worker_start", json{{"subagent", ctx.id},
                                  {"main_round", main_round},
                                  {"subtask", subtask.prompt},
                                  {"tools", subtask.tool_allowlist}});
    ctx.ledger.begin_round(0);
    ctx.ledger.add_note("subtask: " + subtask.prompt);

    std::string status;
    bool terminated = false;
    for (int r = 1; r <= config.runtime.rounds_worker && !terminated; ++r) {
        ctx.round = r;
        ctx.ledger.begin_round(r);

        ModelReply reply;
        try {
            reply = model.complete(
                ModelRequest{Role::act, r, ctx.id, ctx.ledger.render_context(ctx.render_budget())});
        } catch (const KernelError& err) {
            if (err.code() != Errc::backend_unavailable) throw;
            ctx.emit("worker_error", json{{"subagent", ctx.id},
                                          {"round", r},
                                          {"error", "backend_unavailable"}});
            status = "error";
            terminated = true;
            break;
        }
        ctx.clock.advance_ms(reply.latency_ms);
        ctx.emit("model_call", json{{"role", "act"},
                                    {"round", r},
                                    {"subagent", ctx.id},
                                    {"latency_ms", reply.latency_ms},
                                    {"reply", reply.payload}});

        auto act = parse_act(reply.payload, ctx.id, r);
        if (!act) {
            ctx.emit("parse_error", json{{"role", "act"}, {"round", r}, {"subagent", ctx.id}});
            ctx.ledger.add_note("[act parse error, round " + std::to_string(r) + "]");
            continue;
        }

        if (act->terminal) {
            ctx.candidate = act->terminal_text;
            ctx.has_candidate = true;
            VerificationOutcome v;
            try {
                v = verify_subagent(ctx, model);
            } catch (const KernelError& err) {
                if (err.code() != Errc::backend_unavailable) throw;
                ctx.emit("worker_error", json{{"subagent", ctx.id},
                                              {"round", r},
                                              {"error", "backend_unavailable"}});
                status = "error";
                terminated = true;
                break;
            }
            switch (v.kind) {
                case VerificationOutcome::Kind::accepted:
                    status = "ok";
                    terminated = true;
                    break;
                case VerificationOutcome::Kind::retry_with_note:
                    ctx.ledger.add_note("[verify retry] " + v.note);
                    break;
                case VerificationOutcome::Kind::rejected:
                    status = "rejected";
                    terminated = true;
                    break;
            }
            continue;
        }

        try {
            scheduler::validate_batch(act->batch, config.scheduler.batch_cap);
        } catch (const KernelError& err) {
            ctx.emit("batch_rejected",
                     json{{"subagent", ctx.id}, {"round", r}, {"error", err.what()}});
            ctx.ledger.add_note(std::string("[batch rejected] ") + err.what());
            continue;
        }

        json calls = json::array();
        for (const auto& c : act->batch.calls) {
            calls.push_back(json{{"index", c.call_index}, {"tool", c.tool_name}, {"args", c.arguments}});
        }
        ctx.emit("tool_batch", json{{"subagent", ctx.id}, {"round", r}, {"calls", calls}});

        const auto outcomes =
            scheduler::dispatch_parallel(act->batch, tools, config.scheduler, ctx.tool_allowlist);
        std::int64_t batch_ms = 0;
        for (const auto& oc : outcomes) batch_ms = std::max(batch_ms, oc.duration_ms);
        ctx.clock.advance_ms(batch_ms);

        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const auto& oc = outcomes[i];
            ctx.emit("tool_result", json{{"subagent", ctx.id},
                                         {"round", r},
                                         {"index", oc.call_index},
                                         {"tool", oc.tool_name},
                                         {"ok", oc.ok},
                                         {"content", oc.content},
                                         {"error_kind", oc.error_kind},
                                         {"error_message", oc.error_message},
                                         {"duration_ms", oc.duration_ms}});
            const auto& rec = ctx.ledger.record_tool_result(
                oc.tool_name, sub_query_of(act->batch.calls[i].arguments), outcome_content(oc));
            if (rec.truncated) {
                ctx.emit("truncation", json{{"subagent", ctx.id},
                                            {"round", r},
                                            {"record_id", rec.record_id},
                                            {"original_length", rec.original_length},
                                            {"kept", rec.content.size()}});
            }
        }

        const auto closure = ctx.ledger.close_round(tsum);
        if (closure.summarized) {
            ctx.emit("round_summary", json{{"subagent", ctx.id},
                                           {"round", r},
                                           {"before", closure.before},
                                           {"after", closure.after},
                                           {"fallback", closure.fallback},
                                           {"reconstructed", closure.reconstructed_ids},
                                           {"record_id", closure.summary_record_id}});
        }
        for (const auto& rep : ctx.ledger.enforce_budget(tsum)) {
            ctx.emit("compression", json{{"subagent", ctx.id},
                                         {"before", rep.before},
                                         {"after", rep.after},
                                         {"replaced", rep.replaced_ids},
                                         {"fallback_round", rep.fallback_round},
                                         {"merged_summaries", rep.merged_summaries},
                                         {"mechanical", rep.mechanical},
                                         {"registry_size", ctx.ledger.registry().size()}});
        }
    }

    if (!terminated) status = "round_limit_exceeded";

    WorkerOutput out;
    out.summary = summarize_subagent(ctx, model, status);
    out.fragment = std::move(ctx.events);
    out.elapsed_ms = ctx.clock.now_ms() - start_ms;
    return out;
}

RunResult run_task(const Task& task, const KernelConfig& config, ModelBackend& model,
                   const ToolRegistry& tools, memory::MemoryStore& memory,
                   ledger::Summarizer& summarizer) {
    task.validate();
    config.validate();

    const std::string trace_id = task.id + "-s" + std::to_string(config.runtime.seed);
    Trace trace(trace_id, config.runtime.seed);
    VirtualClock clock;

    trace.append("run_start",
                 json{{"trace_id", trace_id},
                      {"seed", config.runtime.seed},
                      {"task", task.to_json()},
                      {"config", config.to_json()}},
                 clock.now_ms());

    // SES memory loading.
    const auto retrieval = memory.retrieve(task.prompt, config.memory.k, config.memory.theta_read);
    {
        json entries = json::array();
        for (const auto& [entry, sim] : retrieval.entries) {
            entries.push_back(json{{"entry_id", entry.entry_id},
                                   {"kind", memory::skill_kind_name(entry.kind)},
                                   {"similarity", sim},
                                   {"skill_text", entry.skill_text}});
        }
        trace.append("memory_load",
                     json{{"k", config.memory.k},
                          {"theta_read", config.memory.theta_read},
                          {"entries", entries}},
                     clock.now_ms());
    }

    std::vector<std::string> main_context;
    main_context.push_back("task: " + task.prompt);
    for (const auto& [name, data] : task.attachments) {
        main_context.push_back("attachment: " + name + " (" + std::to_string(data.size()) +
                               " bytes)");
    }
    for (const auto& [entry, sim] : retrieval.entries) {
        main_context.push_back("memory[" + entry.entry_id + " " +
                               memory::skill_kind_name(entry.kind) + "]: " + entry.skill_text);
    }

    // Optional reasoning, prepended to the planner context.
    if (auto reasoned = optional_reasoning(task, model, config.runtime.reasoning, main_context)) {
        clock.advance_ms(reasoned->second.latency_ms);
        trace.append("model_call",
                     json{{"role", "reason"},
                          {"round", 0},
                          {"subagent", ""},
                          {"latency_ms", reasoned->second.latency_ms},
                          {"reply", reasoned->second.payload},
                          {"context", main_context}},
                     clock.now_ms());
        main_context.insert(main_context.begin(), "intent: " + reasoned->first.note);
    }

    std::vector<SubagentSummary> summaries;
    bool resolved = false;
    int rounds_used = 0;

    for (int r = 1; r <= config.runtime.rounds_main; ++r) {
        rounds_used = r;
        ModelReply reply = model.complete(ModelRequest{Role::plan, r, "", main_context});
        clock.advance_ms(reply.latency_ms);
        trace.append("model_call",
                     json{{"role", "plan"},
                          {"round", r},
                          {"subagent", ""},
                          {"latency_ms", reply.latency_ms},
                          {"reply", reply.payload},
                          {"context", main_context}},
                     clock.now_ms());

        auto plan = parse_plan(reply.payload);
        if (!plan) {
            trace.append("parse_error", json{{"role", "plan"}, {"round", r}}, clock.now_ms());
            main_context.push_back("[plan parse error, round " + std::to_string(r) + "]");
            continue;
        }
        if (plan->resolve) {
            resolved = true;
            break;
        }

        try {
            scheduler::validate_routing(plan->routing, config.scheduler.ensemble_cap);
        } catch (const KernelError& err) {
            trace.append("routing_rejected", json{{"round", r}, {"error", err.what()}},
                         clock.now_ms());
            main_context.push_back(std::string("[routing rejected] ") + err.what());
            continue;
        }
        trace.append("routing",
                     json{{"round", r}, {"decision", routing_to_json(plan->routing)}},
                     clock.now_ms());

        const std::int64_t fork_ms = clock.now_ms();
        std::function<WorkerOutput(const scheduler::Subtask&, std::size_t)> worker =
            [&](const scheduler::Subtask& st, std::size_t) {
                return run_worker(st, r, config, model, tools, summarizer, fork_ms);
            };
        const auto outputs = scheduler::run_ensemble<WorkerOutput>(plan->routing, worker);

        std::int64_t joined_ms = 0;
        json joined = json::array();
        for (const auto& out : outputs) {
            trace.append_fragment(out.fragment);
            joined_ms = std::max(joined_ms, out.elapsed_ms);
            joined.push_back(out.summary.subagent_id);
            summaries.push_back(out.summary);
            main_context.push_back("summary[" + out.summary.subagent_id + "," +
                                   out.summary.status + "]: " + out.summary.text);
        }
        clock.advance_ms(joined_ms);
        trace.append("join", json{{"round", r}, {"subagents", joined}}, clock.now_ms());
    }

    const bool round_limit = !resolved;
    FinalAnswer answer;
    answer.trace_id = trace_id;
    bool forced_zero = false;
    bool mechanical_aggregate = false;

    if (summaries.empty()) {
        if (!round_limit) fail(Errc::empty_ensemble, "plan resolved before any subagent ran");
        forced_zero = true;
        mechanical_aggregate = true;
    } else {
        try {
            AggregateOutcome agg = aggregate_results(summaries, model);
            clock.advance_ms(agg.reply.latency_ms);
            trace.append("model_call",
                         json{{"role", "aggregate"},
                              {"round", 0},
                              {"subagent", ""},
                              {"latency_ms", agg.reply.latency_ms},
                              {"reply", agg.reply.payload}},
                         clock.now_ms());
            answer.answer = agg.answer.answer;
            answer.confidence = agg.answer.confidence;
            answer.contributing_subagents = agg.answer.contributing_subagents;
        } catch (const KernelError& err) {
            const bool degraded = err.code() == Errc::scenario_mismatch ||
                                  err.code() == Errc::backend_unavailable;
            if (!round_limit || !degraded) throw;
            // Best effort at the cap: surface the freshest material we have.
            mechanical_aggregate = true;
            for (auto it = summaries.rbegin(); it != summaries.rend(); ++it) {
                if (!it->result_text.empty()) {
                    answer.answer = it->result_text;
                    break;
                }
            }
            if (answer.answer.empty()) {
                for (auto it = summaries.rbegin(); it != summaries.rend(); ++it) {
                    if (!it->text.empty()) {
                        answer.answer = it->text;
                        break;
                    }
                }
            }
            for (const auto& s : summaries) answer.contributing_subagents.push_back(s.subagent_id);
        }
        if (round_limit) {
            answer.confidence = 0.0;
            forced_zero = true;
        }
    }
    trace.append("aggregate",
                 json{{"answer", answer.answer},
                      {"confidence", answer.confidence},
                      {"contributing", answer.contributing_subagents},
                      {"forced_zero", forced_zero},
                      {"mechanical", mechanical_aggregate}},
                 clock.now_ms());

    // Memory write-back: the single gated write phase of the run.
    ExtractRequest req{trace_id, task.prompt, answer.answer, answer.confidence, trace.size()};
    const auto extraction = memory::extract_skills(req, model, memory.embedder(), clock.now_ms());
    {
        json drafts = json::array();
        for (const auto& e : extraction.entries) {
            drafts.push_back(json{{"kind", memory::skill_kind_name(e.kind)},
                                  {"skill_text", e.skill_text},
                                  {"confidence", e.confidence},
                                  {"task_digest", e.task_digest}});
        }
        trace.append("memory_extract",
                     json{{"count", extraction.entries.size()},
                          {"backend_failed", extraction.backend_failed},
                          {"schema_rejected", extraction.schema_rejected},
                          {"drafts", drafts}},
                     clock.now_ms());
    }
    std::size_t stored_count = 0;
    for (const auto& entry : extraction.entries) {
        const bool stored = memory.store(entry);
        stored_count += stored ? 1 : 0;
        trace.append("memory_write",
                     json{{"entry_id", entry.entry_id}, {"stored", stored}}, clock.now_ms());
    }
    trace.append("memory_write_phase",
                 json{{"considered", extraction.entries.size()}, {"stored", stored_count}},
                 clock.now_ms());

    trace.append("run_end",
                 json{{"answer", answer.answer},
                      {"confidence", answer.confidence},
                      {"round_limit_exceeded", round_limit},
                      {"main_rounds", rounds_used}},
                 clock.now_ms());

    RunResult result;
    result.answer = std::move(answer);
    result.trace = std::move(trace);
    result.round_limit_exceeded = round_limit;
    result.main_rounds = rounds_used;
    return result;
}

}  // namespace agentk::runtime
