#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agentk/config.hpp"
#include "agentk/scenario.hpp"

namespace agentk::report {

struct TaskSpec {
    std::string name;
    std::string scenario_path;
};

struct AttemptResult {
    std::int64_t seed = 0;
    bool passed = false;
    std::string answer;
    double confidence = 0.0;
    std::string error;  // harness failure, if any
};

struct TaskReport {
    std::string name;
    std::vector<AttemptResult> attempts;
    bool passed = false;  // pass@k: any attempt succeeded
};

struct ReportResult {
    std::vector<TaskReport> tasks;
    int attempts = 0;
    int processes = 0;
    int peak_concurrency = 0;

    int passed_count() const;
    std::string table() const;
};

std::vector<TaskSpec> load_scenario_set(const std::string& set_path);

/// Runs each task `attempts` times (seeds base, base+1, ...) with at most
/// `processes` tasks in flight. Attempts within a task run sequentially on
/// a snapshot of the base memory store; write-backs merge in task order
/// after every task has finished. An attempt passes when its answer equals
/// the scenario's expected_answer (or, without one, when confidence > 0).
ReportResult run_report(const std::vector<TaskSpec>& tasks, int attempts, int processes,
                        const KernelConfig& base_config,
                        const std::optional<std::string>& config_path = std::nullopt,
                        const std::string& harness_log_path = "");

}  // namespace agentk::report
