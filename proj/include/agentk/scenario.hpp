#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agentk/config.hpp"
#include "agentk/ledger.hpp"
#include "agentk/model.hpp"
#include "agentk/tools.hpp"

namespace agentk {

/// A scenario file scripts one task end to end: the prompt, every model
/// reply keyed by (role, round, subagent) — optionally narrowed to
/// specific seeds — fake tool behaviors, summarizer behavior and fault
/// schedules. Runs are fully reproducible from the file plus a seed.
struct Scenario {
    struct Reply {
        std::string role;
        int round = 0;            // 0 = any round
        std::string subagent;     // empty = main agent
        std::vector<std::int64_t> seeds;  // empty = any seed
        json payload;
        std::int64_t latency_ms = 10;
    };
    struct BackendFault {
        std::string role;
        std::string subagent;  // empty = any
        int round = 0;         // 0 = any
        std::vector<std::int64_t> seeds;
    };
    struct SummarizerFault {
        std::string purpose;   // empty = any
        std::string owner;     // empty = any
        int round = -1;        // -1 = any
    };

    Task task;
    json config_overrides;  // object or null
    std::optional<std::string> expected_answer;
    std::vector<Reply> replies;
    json tool_specs;  // name -> behavior object
    json summarizer_spec;
    std::vector<BackendFault> backend_faults;
    std::vector<SummarizerFault> summarizer_faults;
    std::string source_name;

    static Scenario parse(const json& j, const std::string& source_name);
    static Scenario load_file(const std::string& path);
};

class ScriptedBackend final : public ModelBackend {
public:
    ScriptedBackend(const Scenario& scenario, std::int64_t seed)
        : scenario_(scenario), seed_(seed) {}

    ModelReply complete(const ModelRequest& request) override;
    std::vector<SkillDraft> extract(const ExtractRequest& request) override;

private:
    const json* find_payload(const std::string& role, int round, const std::string& subagent,
                             std::int64_t* latency_out) const;

    const Scenario& scenario_;
    std::int64_t seed_;
};

/// Scenario-driven summarizer; a fault entry makes the matching call
/// unavailable so ledger fallbacks can be exercised.
class ScriptedSummarizer final : public ledger::Summarizer {
public:
    explicit ScriptedSummarizer(const Scenario& scenario) : scenario_(scenario) {}
    std::optional<std::string> summarize(const Request& request) override;

private:
    const Scenario& scenario_;
};

ToolRegistry build_scripted_tools(const Scenario& scenario, const KernelConfig& config);

/// Effective config for a run: defaults, then optional config file, then
/// the scenario's overrides, then the seed.
KernelConfig effective_config(const Scenario& scenario, const std::optional<std::string>& config_path,
                              std::optional<std::int64_t> seed);

}  // namespace agentk
