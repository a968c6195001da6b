#include "agentk/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>

#include "agentk/replay.hpp"
#include "agentk/report.hpp"
#include "agentk/runtime.hpp"
#include "agentk/scenario.hpp"

namespace agentk::cli {

namespace fs = std::filesystem;

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    try {
        Scenario scenario = Scenario::load_file(options.scenario_path);
        KernelConfig config = effective_config(scenario, options.config_path, options.seed);
        for (const auto& [key, value] : options.overrides) config.apply_dotted(key, value);
        if (options.seed) config.runtime.seed = *options.seed;

        ScriptedBackend backend(scenario, config.runtime.seed);
        ScriptedSummarizer summarizer(scenario);
        ToolRegistry tools = build_scripted_tools(scenario, config);
        auto embedder = std::make_shared<memory::HashedBagEmbedder>(config.memory.dimension);
        auto store = memory::MemoryStore::open(embedder, config.memory);

        auto result = runtime::run_task(scenario.task, config, backend, tools, *store, summarizer);
        if (!options.trace_path.empty()) result.trace.write_file(options.trace_path);

        out << "task: " << scenario.task.id << "\n";
        out << "answer: " << result.answer.answer << "\n";
        out << "confidence: " << result.answer.confidence << "\n";
        out << "contributing:";
        for (const auto& id : result.answer.contributing_subagents) out << " " << id;
        out << "\n";
        if (result.round_limit_exceeded) out << "flag: round_limit_exceeded\n";
        out << "rounds: " << result.main_rounds << "\n";
        out << "events: " << result.trace.size() << "\n";
        if (!options.trace_path.empty()) out << "trace: " << options.trace_path << "\n";
        if (scenario.expected_answer) {
            out << "expected: " << *scenario.expected_answer << " ("
                << (result.answer.answer == *scenario.expected_answer ? "match" : "mismatch")
                << ")\n";
        }
        return 0;
    } catch (const std::exception& ex) {
        err << "run failed: " << ex.what() << "\n";
        return 1;
    }
}

int cmd_replay(const std::string& trace_path, std::ostream& out, std::ostream& err) {
    try {
        const auto result = replay::replay_file(trace_path);
        if (result.ok) {
            out << "replay ok: " << result.checked << " events match\n";
            return 0;
        }
        err << "replay divergence at event " << result.divergence_index << "\n";
        err << "  expected: " << result.expected << "\n";
        err << "  actual:   " << result.actual << "\n";
        return 1;
    } catch (const std::exception& ex) {
        err << "replay failed: " << ex.what() << "\n";
        return 2;
    }
}

int cmd_memory(const MemoryOptions& options, std::ostream& out, std::ostream& err) {
    try {
        if (!fs::exists(options.store_path)) {
            err << "memory store not found: " << options.store_path << "\n";
            return 1;
        }
        KernelConfig config;
        if (options.config_path) config = KernelConfig::load_file(*options.config_path);
        memory::MemoryConfig mem_cfg = config.memory;
        mem_cfg.store_path = options.store_path;
        auto embedder = std::make_shared<memory::HashedBagEmbedder>(mem_cfg.dimension);
        auto store = memory::MemoryStore::open(embedder, mem_cfg);

        if (options.subcommand == "list") {
            for (const auto& e : store->entries()) {
                out << e.entry_id << "  " << memory::skill_kind_name(e.kind) << "  conf="
                    << std::fixed << std::setprecision(2) << e.confidence << "  "
                    << e.skill_text.substr(0, 60) << (e.skill_text.size() > 60 ? "…" : "") << "\n";
            }
            out << store->size() << " entries\n";
            return 0;
        }
        if (options.subcommand == "show") {
            auto entry = store->find(options.entry_id);
            if (!entry) {
                err << "no such entry: " << options.entry_id << "\n";
                return 1;
            }
            json j = entry->to_json();
            j.erase("embedding");
            j["embedding_dim"] = entry->embedding.size();
            out << j.dump(2) << "\n";
            return 0;
        }
        if (options.subcommand == "compact") {
            // Re-run the write gate over the file in order; entries the
            // gate would now reject are dropped.
            memory::MemoryConfig fresh_cfg = mem_cfg;
            fresh_cfg.store_path.clear();
            memory::MemoryStore fresh(embedder, fresh_cfg);
            std::size_t kept = 0, dropped = 0;
            for (const auto& e : store->entries()) {
                if (fresh.store(e)) {
                    ++kept;
                } else {
                    ++dropped;
                }
            }
            const std::string tmp = options.store_path + ".compact";
            {
                std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
                if (!o) fail(Errc::io_error, "cannot write " + tmp);
                for (const auto& e : fresh.entries()) o << e.to_json().dump() << '\n';
            }
            fs::rename(tmp, options.store_path);
            out << "kept " << kept << ", dropped " << dropped << "\n";
            return 0;
        }
        err << "unknown memory subcommand: " << options.subcommand << "\n";
        return 1;
    } catch (const std::exception& ex) {
        err << "memory command failed: " << ex.what() << "\n";
        return 1;
    }
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const auto tasks = report::load_scenario_set(options.set_path);
        KernelConfig config;
        if (options.config_path) config = KernelConfig::load_file(*options.config_path);
        for (const auto& [key, value] : options.overrides) config.apply_dotted(key, value);
        if (options.seed) config.runtime.seed = *options.seed;
        config.harness.attempts = options.attempts;
        config.harness.processes = options.processes;
        config.validate();

        const auto result = report::run_report(tasks, options.attempts, options.processes, config,
                                               options.config_path, options.harness_log_path);
        out << result.table();
        return 0;
    } catch (const std::exception& ex) {
        err << "report failed: " << ex.what() << "\n";
        return 1;
    }
}

}  // namespace agentk::cli
