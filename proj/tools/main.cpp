#include <CLI11.hpp>

#include "agentk/cli.hpp"
#include "agentk/config.hpp"

using namespace agentk;

namespace {

// Every config leaf is overridable by a flag of the same dotted name.
void add_config_flags(CLI::App* cmd, std::vector<std::pair<std::string, std::string>>& overrides) {
    const json defaults = KernelConfig{}.to_json();
    for (const auto& [section, fields] : defaults.items()) {
        for (const auto& [field, value] : fields.items()) {
            const std::string dotted = section + "." + field;
            cmd->add_option_function<std::string>(
                   "--" + dotted,
                   [dotted, &overrides](const std::string& v) { overrides.emplace_back(dotted, v); },
                   "override config field " + dotted + " (default " + value.dump() + ")")
                ->expected(1);
        }
    }
    cmd->add_option_function<std::string>(
           "--override",
           [&overrides](const std::string& kv) {
               const auto eq = kv.find('=');
               if (eq == std::string::npos) {
                   throw CLI::ValidationError("--override expects section.field=value");
               }
               overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
           },
           "override config field: --override section.field=value")
        ->expected(1)
        ->take_all();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agentk: deterministic agent-orchestration kernel"};
    app.require_subcommand(1);

    cli::RunOptions run_opts;
    std::string run_config, run_seed;
    auto* run = app.add_subcommand("run", "run a scenario and write its trace");
    run->add_option("--scenario", run_opts.scenario_path, "scenario JSON file")->required();
    run->add_option("--config", run_config, "kernel config JSON file")->envname("LEMON_CONFIG");
    run->add_option("--seed", run_seed, "run seed");
    run->add_option("--trace", run_opts.trace_path, "output trace path (JSONL)");
    add_config_flags(run, run_opts.overrides);

    std::string replay_trace;
    auto* replay = app.add_subcommand("replay", "re-execute a trace and verify every event");
    replay->add_option("--trace", replay_trace, "trace JSONL file")->required();

    cli::MemoryOptions mem_opts;
    std::string mem_config;
    auto* mem = app.add_subcommand("memory", "inspect or compact a memory store");
    mem->add_option("subcommand", mem_opts.subcommand, "list | show | compact")->required();
    mem->add_option("entry_id", mem_opts.entry_id, "entry id (for show)");
    mem->add_option("--store", mem_opts.store_path, "store JSONL file")->required();
    mem->add_option("--config", mem_config, "kernel config JSON file")->envname("LEMON_CONFIG");

    cli::ReportOptions rep_opts;
    std::string rep_config, rep_seed;
    auto* rep = app.add_subcommand("report", "run a scenario set and print the pass@k table");
    rep->add_option("--set", rep_opts.set_path, "scenario set JSON file")->required();
    rep->add_option("--attempts", rep_opts.attempts, "attempts per task (k)");
    rep->add_option("--processes", rep_opts.processes, "max tasks in flight");
    rep->add_option("--seed", rep_seed, "base seed (attempt i uses seed+i)");
    rep->add_option("--config", rep_config, "kernel config JSON file")->envname("LEMON_CONFIG");
    rep->add_option("--harness-log", rep_opts.harness_log_path, "write begin/end overlap log");
    add_config_flags(rep, rep_opts.overrides);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (!run_config.empty()) run_opts.config_path = run_config;
        if (!run_seed.empty()) run_opts.seed = std::stoll(run_seed);
        return cli::cmd_run(run_opts, std::cout, std::cerr);
    }
    if (replay->parsed()) {
        return cli::cmd_replay(replay_trace, std::cout, std::cerr);
    }
    if (mem->parsed()) {
        if (!mem_config.empty()) mem_opts.config_path = mem_config;
        return cli::cmd_memory(mem_opts, std::cout, std::cerr);
    }
    if (rep->parsed()) {
        if (!rep_config.empty()) rep_opts.config_path = rep_config;
        if (!rep_seed.empty()) rep_opts.seed = std::stoll(rep_seed);
        return cli::cmd_report(rep_opts, std::cout, std::cerr);
    }
    return 1;
}
