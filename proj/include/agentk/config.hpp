#pragma once

#include <string>

#include "agentk/common.hpp"
#include "agentk/gateway.hpp"
#include "agentk/ledger.hpp"
#include "agentk/memory.hpp"
#include "agentk/scheduler.hpp"

namespace agentk {

struct RuntimeConfig {
    int rounds_main = 10;
    int rounds_worker = 20;
    bool reasoning = false;
    std::int64_t seed = 0;
    double temperature = 1.0;        // opaque passthrough for live backends
    std::int64_t max_output_tokens = 128000;
};

struct HarnessConfig {
    int attempts = 3;
    int processes = 3;
};

struct KernelConfig {
    ledger::LedgerConfig ledger;
    memory::MemoryConfig memory;
    scheduler::SchedulerConfig scheduler;
    gateway::BackoffPolicy gateway;
    RuntimeConfig runtime;
    HarnessConfig harness;

    void validate() const;
    json to_json() const;
    static KernelConfig from_json(const json& j);
    static KernelConfig load_file(const std::string& path);

    /// Deep-merge a partial override object (scenario or file layering).
    void merge(const json& overrides);
    /// "--section.field value" CLI overrides; value is parsed as JSON when
    /// possible and falls back to a string.
    void apply_dotted(const std::string& dotted_key, const std::string& value);
};

}  // namespace agentk
