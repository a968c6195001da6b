#include "agentk/model.hpp"

namespace agentk {

const char* role_name(Role role) {
    switch (role) {
        case Role::plan: return "plan";
        case Role::act: return "act";
        case Role::verify: return "verify";
        case Role::summarize: return "summarize";
        case Role::aggregate: return "aggregate";
        case Role::reason: return "reason";
    }
    return "unknown";
}

std::optional<Role> role_from_name(const std::string& name) {
    if (name == "plan") return Role::plan;
    if (name == "act") return Role::act;
    if (name == "verify") return Role::verify;
    if (name == "summarize") return Role::summarize;
    if (name == "aggregate") return Role::aggregate;
    if (name == "reason") return Role::reason;
    return std::nullopt;
}

const char* verification_name(VerificationOutcome::Kind k) {
    switch (k) {
        case VerificationOutcome::Kind::accepted: return "accepted";
        case VerificationOutcome::Kind::retry_with_note: return "retry";
        case VerificationOutcome::Kind::rejected: return "rejected";
    }
    return "unknown";
}

void Task::validate() const {
    if (prompt.empty()) fail(Errc::invalid_argument, "task prompt is empty");
    if (deadline_rounds_main < 1) fail(Errc::invalid_argument, "deadline_rounds_main < 1");
    if (deadline_rounds_worker < 1) fail(Errc::invalid_argument, "deadline_rounds_worker < 1");
}

json Task::to_json() const {
    json atts = json::array();
    for (const auto& [name, data] : attachments) {
        atts.push_back(json{{"name", name}, {"text", data}});
    }
    return json{{"id", id},
                {"prompt", prompt},
                {"attachments", atts},
                {"deadline_rounds_main", deadline_rounds_main},
                {"deadline_rounds_worker", deadline_rounds_worker}};
}

Task Task::from_json(const json& j) {
    Task t;
    t.id = j.value("id", "task");
    t.prompt = j.value("prompt", "");
    if (j.contains("attachments")) {
        for (const auto& a : j.at("attachments")) {
            t.attachments.emplace_back(a.value("name", ""), a.value("text", ""));
        }
    }
    t.deadline_rounds_main = j.value("deadline_rounds_main", 10);
    t.deadline_rounds_worker = j.value("deadline_rounds_worker", 20);
    t.validate();
    return t;
}

std::optional<PlanReply> parse_plan(const json& payload) {
    if (!payload.is_object()) return std::nullopt;
    if (payload.value("resolve", false)) {
        PlanReply r;
        r.resolve = true;
        return r;
    }
    if (!payload.contains("route") || !payload.at("route").is_array()) return std::nullopt;
    PlanReply r;
    r.routing.rationale = payload.value("rationale", "");
    for (const auto& item : payload.at("route")) {
        if (!item.is_object() || !item.contains("subagent") || !item.contains("prompt")) {
            return std::nullopt;
        }
        if (!item.at("subagent").is_string() || !item.at("prompt").is_string()) return std::nullopt;
        scheduler::Subtask st;
        st.subagent_id = item.at("subagent").get<std::string>();
        st.prompt = item.at("prompt").get<std::string>();
        if (item.contains("tools")) {
            if (!item.at("tools").is_array()) return std::nullopt;
            for (const auto& t : item.at("tools")) {
                if (!t.is_string()) return std::nullopt;
                st.tool_allowlist.push_back(t.get<std::string>());
            }
        }
        r.routing.subtasks.push_back(std::move(st));
    }
    return r;
}

std::optional<ActReply> parse_act(const json& payload, const std::string& subagent, int round) {
    if (!payload.is_object()) return std::nullopt;
    if (payload.contains("terminal")) {
        if (!payload.at("terminal").is_string()) return std::nullopt;
        ActReply r;
        r.terminal = true;
        r.terminal_text = payload.at("terminal").get<std::string>();
        return r;
    }
    if (!payload.contains("calls") || !payload.at("calls").is_array()) return std::nullopt;
    ActReply r;
    r.batch.issued_by = subagent;
    r.batch.round = round;
    int position = 0;
    for (const auto& c : payload.at("calls")) {
        if (!c.is_object() || !c.contains("tool") || !c.at("tool").is_string()) return std::nullopt;
        scheduler::ToolCall call;
        call.call_index = c.value("index", position);
        call.tool_name = c.at("tool").get<std::string>();
        call.arguments = c.value("args", json::object());
        r.batch.calls.push_back(std::move(call));
        ++position;
    }
    return r;
}

std::optional<VerificationOutcome> parse_verify(const json& payload) {
    if (!payload.is_object() || !payload.contains("outcome") || !payload.at("outcome").is_string()) {
        return std::nullopt;
    }
    const std::string o = payload.at("outcome").get<std::string>();
    VerificationOutcome v;
    v.note = payload.value("note", "");
    if (o == "accepted") {
        v.kind = VerificationOutcome::Kind::accepted;
    } else if (o == "retry" || o == "retry_with_note") {
        v.kind = VerificationOutcome::Kind::retry_with_note;
    } else if (o == "rejected") {
        v.kind = VerificationOutcome::Kind::rejected;
    } else {
        return std::nullopt;
    }
    return v;
}

std::optional<std::string> parse_summary(const json& payload) {
    if (!payload.is_object() || !payload.contains("text") || !payload.at("text").is_string()) {
        return std::nullopt;
    }
    return payload.at("text").get<std::string>();
}

std::optional<AggregateReply> parse_aggregate(const json& payload) {
    if (!payload.is_object() || !payload.contains("answer") || !payload.at("answer").is_string()) {
        return std::nullopt;
    }
    AggregateReply r;
    r.answer = payload.at("answer").get<std::string>();
    if (payload.contains("confidence")) {
        if (!payload.at("confidence").is_number()) return std::nullopt;
        r.confidence = payload.at("confidence").get<double>();
    }
    return r;
}

std::optional<IntentNote> parse_reason(const json& payload) {
    if (!payload.is_object() || !payload.contains("note") || !payload.at("note").is_string()) {
        return std::nullopt;
    }
    return IntentNote{payload.at("note").get<std::string>()};
}

json routing_to_json(const scheduler::RoutingDecision& d) {
    json route = json::array();
    for (const auto& st : d.subtasks) {
        route.push_back(json{{"subagent", st.subagent_id},
                             {"prompt", st.prompt},
                             {"tools", st.tool_allowlist}});
    }
    return json{{"rationale", d.rationale}, {"route", route}};
}

}  // namespace agentk
