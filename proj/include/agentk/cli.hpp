#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace agentk::cli {

struct RunOptions {
    std::string scenario_path;
    std::optional<std::string> config_path;
    std::optional<std::int64_t> seed;
    std::string trace_path = "trace.jsonl";
    std::vector<std::pair<std::string, std::string>> overrides;  // dotted key -> value
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& trace_path, std::ostream& out, std::ostream& err);

struct MemoryOptions {
    std::string subcommand;  // list | show | compact
    std::string store_path;
    std::string entry_id;
    std::optional<std::string> config_path;
};

int cmd_memory(const MemoryOptions& options, std::ostream& out, std::ostream& err);

struct ReportOptions {
    std::string set_path;
    int attempts = 3;
    int processes = 3;
    std::optional<std::string> config_path;
    std::optional<std::int64_t> seed;
    std::string harness_log_path;
    std::vector<std::pair<std::string, std::string>> overrides;
};

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

}  // namespace agentk::cli
