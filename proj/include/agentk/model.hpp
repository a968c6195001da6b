#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentk/common.hpp"
#include "agentk/scheduler.hpp"

namespace agentk {

enum class Role { plan, act, verify, summarize, aggregate, reason };

const char* role_name(Role role);
std::optional<Role> role_from_name(const std::string& name);

struct Task {
    std::string id;
    std::string prompt;
    std::vector<std::pair<std::string, std::string>> attachments;  // name -> bytes
    int deadline_rounds_main = 10;
    int deadline_rounds_worker = 20;

    void validate() const;
    json to_json() const;
    static Task from_json(const json& j);
};

struct FinalAnswer {
    std::string answer;
    double confidence = 0.0;
    std::vector<std::string> contributing_subagents;
    std::string trace_id;
};

struct IntentNote {
    std::string note;
};

struct VerificationOutcome {
    enum class Kind { accepted, retry_with_note, rejected };
    Kind kind = Kind::accepted;
    std::string note;
};

const char* verification_name(VerificationOutcome::Kind k);

struct ModelRequest {
    Role role = Role::plan;
    int round = 0;
    std::string subagent;                // empty for main-agent calls
    std::vector<std::string> context;    // rendered messages
};

struct ModelReply {
    Role role = Role::plan;
    json payload;
    std::int64_t latency_ms = 10;
};

struct SkillDraft {
    std::string kind;
    std::string skill_text;
    double confidence = 0.5;
    std::string task_digest;
};

struct ExtractRequest {
    std::string trace_id;
    std::string task_prompt;
    std::string answer;
    double confidence = 0.0;
    std::size_t event_count = 0;
};

/// Pluggable model boundary. Scripted and replay backends implement this;
/// a live adapter would too. Throws KernelError(backend_unavailable) when
/// it cannot answer the requested role, and scenario_mismatch when a
/// scripted run has no reply for the observed state.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual ModelReply complete(const ModelRequest& request) = 0;
    virtual std::vector<SkillDraft> extract(const ExtractRequest& request) = 0;
};

// ---- typed payload parsing -------------------------------------------------
// The reply payloads are a strict structured schema; anything that does not
// parse is reported to the caller as nullopt and costs the round.

struct PlanReply {
    bool resolve = false;
    scheduler::RoutingDecision routing;
};

struct ActReply {
    bool terminal = false;
    std::string terminal_text;
    scheduler::ToolBatch batch;
};

struct AggregateReply {
    std::string answer;
    double confidence = 0.0;
};

std::optional<PlanReply> parse_plan(const json& payload);
std::optional<ActReply> parse_act(const json& payload, const std::string& subagent, int round);
std::optional<VerificationOutcome> parse_verify(const json& payload);
std::optional<std::string> parse_summary(const json& payload);
std::optional<AggregateReply> parse_aggregate(const json& payload);
std::optional<IntentNote> parse_reason(const json& payload);

json routing_to_json(const scheduler::RoutingDecision& d);

}  // namespace agentk
