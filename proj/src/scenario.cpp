#include "agentk/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "agentk/gateway.hpp"

namespace agentk {

namespace {

std::vector<std::int64_t> read_seeds(const json& j) {
    std::vector<std::int64_t> seeds;
    if (j.contains("seed")) seeds.push_back(j.at("seed").get<std::int64_t>());
    if (j.contains("seeds")) {
        for (const auto& s : j.at("seeds")) seeds.push_back(s.get<std::int64_t>());
    }
    return seeds;
}

/// Canonical reply payload: explicit "payload" wins (for malformed-reply
/// scenarios), otherwise the recognized role fields are lifted out.
json canonical_payload(const std::string& role, const json& entry) {
    if (entry.contains("payload")) return entry.at("payload");
    json p = json::object();
    if (role == "plan") {
        if (entry.value("resolve", false)) return json{{"resolve", true}};
        if (entry.contains("route")) {
            p["route"] = entry.at("route");
            p["rationale"] = entry.value("rationale", "");
        }
        return p;
    }
    if (role == "act") {
        if (entry.contains("terminal")) return json{{"terminal", entry.at("terminal")}};
        if (entry.contains("calls")) return json{{"calls", entry.at("calls")}};
        return p;
    }
    if (role == "verify") {
        if (entry.contains("outcome")) {
            p["outcome"] = entry.at("outcome");
            p["note"] = entry.value("note", "");
        }
        return p;
    }
    if (role == "summarize") {
        if (entry.contains("text")) p["text"] = entry.at("text");
        return p;
    }
    if (role == "aggregate") {
        if (entry.contains("answer")) {
            p["answer"] = entry.at("answer");
            p["confidence"] = entry.value("confidence", 0.0);
        }
        return p;
    }
    if (role == "reason") {
        if (entry.contains("note")) p["note"] = entry.at("note");
        return p;
    }
    if (role == "extract") {
        p["entries"] = entry.value("entries", json::array());
        return p;
    }
    return p;
}

std::string line_of_offset(const std::string& text, std::size_t byte_offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte_offset && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return std::to_string(line);
}

}  // namespace

Scenario Scenario::parse(const json& j, const std::string& source_name) {
    Scenario sc;
    sc.source_name = source_name;
    if (!j.is_object() || !j.contains("task")) {
        fail(Errc::bad_scenario, source_name + ": scenario must be an object with a task");
    }
    try {
        sc.task = Task::from_json(j.at("task"));
    } catch (const KernelError& err) {
        fail(Errc::bad_scenario, source_name + ": " + err.what());
    } catch (const json::exception& ex) {
        fail(Errc::bad_scenario, source_name + ": bad task: " + ex.what());
    }
    sc.config_overrides = j.value("config", json());
    if (j.contains("expected_answer")) {
        sc.expected_answer = j.at("expected_answer").get<std::string>();
    }
    for (const auto& entry : j.value("replies", json::array())) {
        if (!entry.is_object() || !entry.contains("role")) {
            fail(Errc::bad_scenario, source_name + ": reply entry without role");
        }
        Reply r;
        r.role = entry.at("role").get<std::string>();
        r.round = entry.value("round", 0);
        r.subagent = entry.value("subagent", "");
        r.seeds = read_seeds(entry);
        r.latency_ms = entry.value("latency_ms", std::int64_t{10});
        r.payload = canonical_payload(r.role, entry);
        sc.replies.push_back(std::move(r));
    }
    sc.tool_specs = j.value("tools", json::object());
    sc.summarizer_spec = j.value("summarizer", json::object());
    if (j.contains("faults")) {
        const auto& f = j.at("faults");
        for (const auto& b : f.value("backend", json::array())) {
            BackendFault bf;
            bf.role = b.value("role", "");
            bf.subagent = b.value("subagent", "");
            bf.round = b.value("round", 0);
            bf.seeds = read_seeds(b);
            sc.backend_faults.push_back(std::move(bf));
        }
        for (const auto& s : f.value("summarizer", json::array())) {
            SummarizerFault sf;
            sf.purpose = s.value("purpose", "");
            sf.owner = s.value("owner", "");
            sf.round = s.value("round", -1);
            sc.summarizer_faults.push_back(std::move(sf));
        }
    }
    return sc;
}

Scenario Scenario::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::bad_scenario, "cannot open scenario file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return parse(json::parse(text), path);
    } catch (const json::parse_error& ex) {
        fail(Errc::bad_scenario,
             path + ":" + line_of_offset(text, ex.byte) + ": " + ex.what());
    }
}

const json* ScriptedBackend::find_payload(const std::string& role, int round,
                                          const std::string& subagent,
                                          std::int64_t* latency_out) const {
    for (const auto& fault : scenario_.backend_faults) {
        if (fault.role != role) continue;
        if (!fault.subagent.empty() && fault.subagent != subagent) continue;
        if (fault.round != 0 && fault.round != round) continue;
        if (!fault.seeds.empty() &&
            std::find(fault.seeds.begin(), fault.seeds.end(), seed_) == fault.seeds.end()) {
            continue;
        }
        fail(Errc::backend_unavailable,
             "scripted fault for role " + role + " (subagent '" + subagent + "')");
    }
    // Seed-specific entries shadow generic ones.
    for (const bool want_seeded : {true, false}) {
        for (const auto& r : scenario_.replies) {
            if (r.role != role || r.subagent != subagent) continue;
            if (r.round != 0 && r.round != round) continue;
            const bool seeded = !r.seeds.empty();
            if (seeded != want_seeded) continue;
            if (seeded && std::find(r.seeds.begin(), r.seeds.end(), seed_) == r.seeds.end()) {
                continue;
            }
            if (latency_out) *latency_out = r.latency_ms;
            return &r.payload;
        }
    }
    return nullptr;
}

ModelReply ScriptedBackend::complete(const ModelRequest& request) {
    ModelReply reply;
    reply.role = request.role;
    std::int64_t latency = 10;
    const json* payload =
        find_payload(role_name(request.role), request.round, request.subagent, &latency);
    if (!payload) {
        fail(Errc::scenario_mismatch,
             scenario_.source_name + ": no scripted reply for role=" +
                 role_name(request.role) + " round=" + std::to_string(request.round) +
                 " subagent='" + request.subagent + "' seed=" + std::to_string(seed_));
    }
    reply.payload = *payload;
    reply.latency_ms = latency;
    return reply;
}

std::vector<SkillDraft> ScriptedBackend::extract(const ExtractRequest&) {
    std::int64_t latency = 10;
    const json* payload = find_payload("extract", 0, "", &latency);
    std::vector<SkillDraft> drafts;
    if (!payload || !payload->contains("entries")) return drafts;
    for (const auto& e : payload->at("entries")) {
        SkillDraft d;
        d.kind = e.value("kind", "");
        d.skill_text = e.value("skill_text", "");
        d.confidence = e.value("confidence", 0.5);
        d.task_digest = e.value("task_digest", "");
        drafts.push_back(std::move(d));
    }
    return drafts;
}

std::optional<std::string> ScriptedSummarizer::summarize(const Request& request) {
    for (const auto& fault : scenario_.summarizer_faults) {
        if (!fault.purpose.empty() && fault.purpose != request.purpose) continue;
        if (!fault.owner.empty() && fault.owner != request.owner) continue;
        if (fault.round >= 0 && fault.round != request.round) continue;
        return std::nullopt;
    }
    const std::string mode = scenario_.summarizer_spec.value("mode", "head");
    if (mode == "unavailable") return std::nullopt;
    if (mode == "sized") {
        const std::size_t size = std::min<std::size_t>(
            scenario_.summarizer_spec.value("size", std::size_t{300}), request.cap);
        std::string prefix = "[" + request.purpose + " summary " + request.owner + " r" +
                             std::to_string(request.round) + "] ";
        if (prefix.size() >= size) return prefix.substr(0, size);
        return prefix + filler_text(size - prefix.size());
    }
    // "head": deterministic shrink that keeps the input's leading content.
    const std::size_t cap = std::min<std::size_t>(request.cap, 200);
    return request.input.substr(0, std::min(request.input.size(), cap));
}

namespace {

class ScriptedTool final : public Tool {
public:
    ScriptedTool(std::string name, json spec, const KernelConfig& config)
        : name_(std::move(name)), spec_(std::move(spec)), config_(&config) {}

    static ToolResult step_result(const json& step) {
        ToolResult r;
        r.delay_ms = step.value("delay_ms", std::int64_t{5});
        if (step.contains("error")) {
            r.ok = false;
            r.error_kind = step.at("error").get<std::string>();
            r.error_message = step.value("message", "scripted failure");
        } else {
            r.ok = true;
            r.content = step.value("result", "");
        }
        return r;
    }

    std::function<ToolResult()> prepare(const json& args, const CallContext&) override {
        const std::string behavior = spec_.value("behavior", "fixed");
        const std::int64_t delay = spec_.value("delay_ms", std::int64_t{5});
        if (behavior == "echo") {
            std::string text = args.is_object() ? args.value("text", args.dump()) : args.dump();
            return [text, delay]() { return ToolResult{true, text, "", "", delay}; };
        }
        if (behavior == "fixed") {
            std::string result = spec_.value("result", "");
            return [result, delay]() { return ToolResult{true, result, "", "", delay}; };
        }
        if (behavior == "filler") {
            const std::size_t size = spec_.value("size", std::size_t{1000});
            return [size, delay]() { return ToolResult{true, filler_text(size), "", "", delay}; };
        }
        if (behavior == "script") {
            json step;
            {
                std::lock_guard<std::mutex> lock(mu_);
                const auto& script = spec_.at("script");
                if (cursor_ < script.size()) {
                    step = script.at(cursor_++);
                } else {
                    step = json{{"error", "script_exhausted"}};
                }
            }
            return [step]() { return step_result(step); };
        }
        if (behavior == "variants") {
            // Seed-keyed behavior, for scenarios whose attempts differ.
            const std::int64_t seed = config_->runtime.seed;
            json chosen;
            bool found = false;
            for (const bool want_seeded : {true, false}) {
                for (const auto& v : spec_.value("variants", json::array())) {
                    std::vector<std::int64_t> seeds;
                    if (v.contains("seed")) seeds.push_back(v.at("seed").get<std::int64_t>());
                    if (v.contains("seeds")) {
                        for (const auto& s : v.at("seeds")) seeds.push_back(s.get<std::int64_t>());
                    }
                    const bool seeded = !seeds.empty();
                    if (seeded != want_seeded) continue;
                    if (seeded && std::find(seeds.begin(), seeds.end(), seed) == seeds.end()) continue;
                    chosen = v;
                    found = true;
                    break;
                }
                if (found) break;
            }
            if (!found) chosen = json{{"error", "not_found"}};
            const std::int64_t vdelay = chosen.value("delay_ms", delay);
            json step = chosen;
            step["delay_ms"] = vdelay;
            return [step]() { return step_result(step); };
        }
        if (behavior == "gateway") {
            // Full fetch protocol against scripted sources; per call the
            // schedule restarts, so one tool models one stable fault shape.
            json spec = spec_;
            const KernelConfig* config = config_;
            return [spec, config, args]() {
                std::vector<gateway::SourceTier> tiers;
                int index = 0;
                for (const auto& t : spec.value("tiers", json::array())) {
                    std::vector<gateway::SourceReply> script;
                    for (const auto& step : t.value("script", json::array())) {
                        const std::string s = step.get<std::string>();
                        if (s.rfind("ok:", 0) == 0) {
                            script.push_back(gateway::ScriptedSource::ok_reply(s.substr(3)));
                        } else {
                            auto kind = gateway::error_kind_from_name(s);
                            script.push_back(gateway::ScriptedSource::err_reply(
                                kind.value_or(gateway::ErrorKind::network)));
                        }
                    }
                    tiers.push_back(gateway::SourceTier{
                        index, t.value("name", "tier" + std::to_string(index)),
                        t.value("max_retries", 0),
                        std::make_shared<gateway::ScriptedSource>(std::move(script))});
                    ++index;
                }
                std::string query = args.is_object() ? args.value("query", "") : "";
                VirtualClock clock;
                ToolResult r;
                try {
                    query = gateway::sanitize_query(query);
                } catch (const KernelError& err) {
                    r.ok = false;
                    r.error_kind = "empty_after_sanitize";
                    r.error_message = err.what();
                    return r;
                }
                const auto report = gateway::fetch(query, tiers, config->gateway, clock);
                r.delay_ms = clock.now_ms();
                if (report.ok()) {
                    r.ok = true;
                    r.content = report.document->body;
                } else {
                    r.ok = false;
                    r.error_kind = gateway::error_kind_name(report.diagnostic->error_kind);
                    r.error_message = report.diagnostic->suggestion;
                }
                return r;
            };
        }
        fail(Errc::bad_scenario, "unknown tool behavior '" + behavior + "' for " + name_);
    }

private:
    std::string name_;
    json spec_;
    const KernelConfig* config_;
    std::size_t cursor_ = 0;
    std::mutex mu_;
};

}  // namespace

ToolRegistry build_scripted_tools(const Scenario& scenario, const KernelConfig& config) {
    ToolRegistry registry;
    for (const auto& [name, spec] : scenario.tool_specs.items()) {
        if (!spec.is_object()) fail(Errc::bad_scenario, "tool spec for " + name + " must be an object");
        if (spec.value("behavior", "fixed") == "script" && !spec.contains("script")) {
            fail(Errc::bad_scenario, "script tool " + name + " has no script");
        }
        registry.add(name, std::make_shared<ScriptedTool>(name, spec, config));
    }
    return registry;
}

KernelConfig effective_config(const Scenario& scenario, const std::optional<std::string>& config_path,
                              std::optional<std::int64_t> seed) {
    KernelConfig config;
    if (config_path) config = KernelConfig::load_file(*config_path);
    config.merge(scenario.config_overrides);
    if (seed) config.runtime.seed = *seed;
    config.validate();
    return config;
}

}  // namespace agentk
