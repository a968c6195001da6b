#include "agentk/replay.hpp"

#include "agentk/config.hpp"

namespace agentk::replay {

namespace {

std::string reply_key(const std::string& role, int round, const std::string& subagent) {
    return role + "#" + std::to_string(round) + "#" + subagent;
}

std::string summarizer_key(const std::string& purpose, const std::string& owner, int round) {
    return purpose + "#" + owner + "#" + std::to_string(round);
}

}  // namespace

ReplayBackend::ReplayBackend(const std::vector<TraceEvent>& events) {
    for (const auto& e : events) {
        if (e.kind == "model_call") {
            const auto& p = e.payload;
            replies_[reply_key(p.at("role").get<std::string>(), p.value("round", 0),
                               p.value("subagent", ""))]
                .emplace_back(p.at("reply"), p.value("latency_ms", std::int64_t{10}));
        } else if (e.kind == "memory_extract") {
            extract_failed_ = e.payload.value("backend_failed", false);
            for (const auto& d : e.payload.value("drafts", json::array())) {
                SkillDraft draft;
                draft.kind = d.value("kind", "");
                draft.skill_text = d.value("skill_text", "");
                draft.confidence = d.value("confidence", 0.5);
                draft.task_digest = d.value("task_digest", "");
                drafts_.push_back(std::move(draft));
            }
        }
    }
}

ModelReply ReplayBackend::complete(const ModelRequest& request) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = replies_.find(reply_key(role_name(request.role), request.round, request.subagent));
    if (it == replies_.end() || it->second.empty()) {
        fail(Errc::backend_unavailable,
             std::string("no recorded reply for role=") + role_name(request.role) + " round=" +
                 std::to_string(request.round) + " subagent='" + request.subagent + "'");
    }
    ModelReply reply;
    reply.role = request.role;
    reply.payload = it->second.front().first;
    reply.latency_ms = it->second.front().second;
    it->second.pop_front();
    return reply;
}

std::vector<SkillDraft> ReplayBackend::extract(const ExtractRequest&) {
    if (extract_failed_) fail(Errc::backend_unavailable, "recorded extraction failure");
    return drafts_;
}

ReplaySummarizer::ReplaySummarizer(const std::vector<TraceEvent>& events) {
    for (const auto& e : events) {
        if (e.kind != "summarizer_call") continue;
        const auto& p = e.payload;
        calls_[summarizer_key(p.at("purpose").get<std::string>(), p.value("owner", ""),
                              p.value("round", 0))]
            .emplace_back(p.value("available", true), p.value("output", ""));
    }
}

std::optional<std::string> ReplaySummarizer::summarize(const Request& request) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = calls_.find(summarizer_key(request.purpose, request.owner, request.round));
    if (it == calls_.end() || it->second.empty()) {
        fail(Errc::bad_trace, "no recorded summarizer output for purpose=" + request.purpose);
    }
    auto [available, output] = it->second.front();
    it->second.pop_front();
    if (!available) return std::nullopt;
    return output;
}

ReplayMemoryStore::ReplayMemoryStore(std::shared_ptr<memory::Embedder> embedder,
                                     memory::MemoryConfig config,
                                     const std::vector<TraceEvent>& events)
    : memory::MemoryStore(std::move(embedder), std::move(config)) {
    for (const auto& e : events) {
        if (e.kind == "memory_load") {
            memory::RetrievalResult r;
            for (const auto& item : e.payload.value("entries", json::array())) {
                memory::MemoryEntry entry;
                entry.entry_id = item.value("entry_id", "");
                entry.kind = memory::skill_kind_from_name(item.value("kind", ""))
                                 .value_or(memory::SkillKind::technical_insight);
                entry.skill_text = item.value("skill_text", "");
                r.entries.emplace_back(std::move(entry), item.value("similarity", 0.0));
            }
            loads_.push_back(std::move(r));
        } else if (e.kind == "memory_write") {
            writes_.push_back(e.payload.value("stored", false));
        }
    }
}

memory::RetrievalResult ReplayMemoryStore::retrieve(const std::string&, std::size_t,
                                                    double) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (loads_.empty()) fail(Errc::bad_trace, "no recorded memory_load left");
    memory::RetrievalResult r = std::move(loads_.front());
    loads_.pop_front();
    return r;
}

bool ReplayMemoryStore::store(memory::MemoryEntry) {
    std::lock_guard<std::mutex> lock(mu_);
    if (writes_.empty()) fail(Errc::bad_trace, "no recorded memory_write left");
    const bool stored = writes_.front();
    writes_.pop_front();
    return stored;
}

namespace {

class ReplayTool final : public Tool {
public:
    using OutcomeMap = std::map<std::string, ToolResult>;

    explicit ReplayTool(std::shared_ptr<OutcomeMap> outcomes) : outcomes_(std::move(outcomes)) {}

    std::function<ToolResult()> prepare(const json&, const CallContext& ctx) override {
        std::string key =
            ctx.subagent + "#" + std::to_string(ctx.round) + "#" + std::to_string(ctx.call_index);
        {
            // A key repeats only when a worker id recurs across main
            // rounds, which run sequentially; consume front to back.
            std::lock_guard<std::mutex> lock(mu_);
            const int repeat = used_[key]++;
            if (repeat > 0) key += "@" + std::to_string(repeat);
        }
        auto it = outcomes_->find(key);
        if (it == outcomes_->end()) {
            fail(Errc::bad_trace, "no recorded tool outcome for " + key);
        }
        ToolResult r = it->second;
        return [r]() { return r; };
    }

private:
    std::shared_ptr<OutcomeMap> outcomes_;
    std::map<std::string, int> used_;
    std::mutex mu_;
};

}  // namespace

ToolRegistry build_replay_tools(const std::vector<TraceEvent>& events) {
    // One shared outcome table per tool name, keyed by call coordinates.
    std::map<std::string, std::shared_ptr<ReplayTool::OutcomeMap>> tables;
    std::map<std::string, std::map<std::string, int>> seen;
    for (const auto& e : events) {
        if (e.kind != "tool_result") continue;
        const auto& p = e.payload;
        const std::string kind = p.value("error_kind", "");
        if (kind == "unknown_tool" || kind == "tool_not_allowed") continue;  // regenerated natively
        const std::string name = p.at("tool").get<std::string>();
        const std::string subagent = p.value("subagent", "");
        const int round = p.value("round", 0);
        const int index = p.value("index", 0);
        std::string key = subagent + "#" + std::to_string(round) + "#" + std::to_string(index);
        const int repeat = seen[name][key]++;
        if (repeat > 0) key += "@" + std::to_string(repeat);

        ToolResult r;
        r.ok = p.value("ok", false);
        r.content = p.value("content", "");
        r.error_kind = kind;
        r.error_message = p.value("error_message", "");
        r.delay_ms = p.value("duration_ms", std::int64_t{0});
        auto& table = tables[name];
        if (!table) table = std::make_shared<ReplayTool::OutcomeMap>();
        (*table)[key] = r;
    }
    ToolRegistry registry;
    for (auto& [name, table] : tables) {
        registry.add(name, std::make_shared<ReplayTool>(table));
    }
    return registry;
}

ReplayResult replay_events(const std::vector<TraceEvent>& events) {
    if (events.empty() || events.front().kind != "run_start") {
        fail(Errc::bad_trace, "trace does not begin with run_start");
    }
    const json& start = events.front().payload;
    Task task = Task::from_json(start.at("task"));
    KernelConfig config = KernelConfig::from_json(start.at("config"));

    ReplayBackend backend(events);
    ReplaySummarizer summarizer(events);
    auto embedder = std::make_shared<memory::HashedBagEmbedder>(config.memory.dimension);
    memory::MemoryConfig mem_cfg = config.memory;
    mem_cfg.store_path.clear();
    ReplayMemoryStore memory(embedder, mem_cfg, events);
    ToolRegistry tools = build_replay_tools(events);

    runtime::RunResult rerun = runtime::run_task(task, config, backend, tools, memory, summarizer);

    ReplayResult result;
    const auto& regenerated = rerun.trace.events();
    const std::size_t n = std::min(regenerated.size(), events.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string expected = events[i].to_json().dump();
        const std::string actual = regenerated[i].to_json().dump();
        if (expected != actual) {
            result.ok = false;
            result.divergence_index = i;
            result.expected = expected;
            result.actual = actual;
            result.checked = i;
            return result;
        }
    }
    if (regenerated.size() != events.size()) {
        result.ok = false;
        result.divergence_index = n;
        result.expected = events.size() > n ? events[n].to_json().dump() : "<end of trace>";
        result.actual = regenerated.size() > n ? regenerated[n].to_json().dump() : "<end of trace>";
        result.checked = n;
        return result;
    }
    result.ok = true;
    result.checked = events.size();
    return result;
}

ReplayResult replay_file(const std::string& trace_path) {
    return replay_events(Trace::read_file(trace_path));
}

}  // namespace agentk::replay
