#include "agentk/report.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <semaphore>
#include <sstream>
#include <thread>

#include "agentk/runtime.hpp"

namespace agentk::report {

namespace fs = std::filesystem;

int ReportResult::passed_count() const {
    int n = 0;
    for (const auto& t : tasks) n += t.passed ? 1 : 0;
    return n;
}

std::string ReportResult::table() const {
    std::size_t width = 4;
    for (const auto& t : tasks) width = std::max(width, t.name.size());
    std::ostringstream out;
    out << "task" << std::string(width - 4 + 2, ' ') << "result  attempts\n";
    for (const auto& t : tasks) {
        int ok = 0;
        for (const auto& a : t.attempts) ok += a.passed ? 1 : 0;
        out << t.name << std::string(width - t.name.size() + 2, ' ')
            << (t.passed ? "pass" : "fail") << "    " << ok << "/" << t.attempts.size() << "\n";
    }
    out << "total: " << passed_count() << "/" << tasks.size() << " passed (pass@" << attempts
        << ", " << processes << " processes)\n";
    return out.str();
}

std::vector<TaskSpec> load_scenario_set(const std::string& set_path) {
    std::ifstream in(set_path, std::ios::binary);
    if (!in) fail(Errc::bad_scenario, "cannot open scenario set: " + set_path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("scenarios")) {
        fail(Errc::bad_scenario, "scenario set must be an object with a scenarios array: " + set_path);
    }
    const fs::path base = fs::path(set_path).parent_path();
    std::vector<TaskSpec> tasks;
    for (const auto& item : j.at("scenarios")) {
        TaskSpec spec;
        if (item.is_string()) {
            spec.scenario_path = (base / item.get<std::string>()).string();
            spec.name = fs::path(item.get<std::string>()).stem().string();
        } else {
            spec.scenario_path = (base / item.value("scenario", "")).string();
            spec.name = item.value("name", fs::path(spec.scenario_path).stem().string());
        }
        tasks.push_back(std::move(spec));
    }
    return tasks;
}

ReportResult run_report(const std::vector<TaskSpec>& tasks, int attempts, int processes,
                        const KernelConfig& base_config,
                        const std::optional<std::string>& config_path,
                        const std::string& harness_log_path) {
    ReportResult result;
    result.attempts = attempts;
    result.processes = processes;
    result.tasks.resize(tasks.size());

    auto embedder = std::make_shared<memory::HashedBagEmbedder>(base_config.memory.dimension);
    auto base_store = memory::MemoryStore::open(embedder, base_config.memory);

    std::counting_semaphore<256> slots(processes);
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
    std::mutex log_mu;
    std::vector<json> harness_log;
    std::vector<std::vector<memory::MemoryEntry>> write_backs(tasks.size());

    auto log_event = [&](const char* event, std::size_t task_index, int current) {
        if (harness_log_path.empty()) return;
        std::lock_guard<std::mutex> lock(log_mu);
        harness_log.push_back(
            json{{"event", event}, {"task", task_index}, {"in_flight", current}});
    };

    auto run_one_task = [&](std::size_t index) {
        slots.acquire();
        const int current = ++in_flight;
        int prev_peak = peak.load();
        while (current > prev_peak && !peak.compare_exchange_weak(prev_peak, current)) {
        }
        log_event("begin", index, current);

        TaskReport tr;
        tr.name = tasks[index].name;
        std::unique_ptr<memory::MemoryStore> task_store;
        try {
            Scenario scenario = Scenario::load_file(tasks[index].scenario_path);
            const std::size_t before_snapshot = base_store->size();
            task_store = base_store->snapshot();
            for (int a = 0; a < attempts; ++a) {
                AttemptResult ar;
                ar.seed = base_config.runtime.seed + a;
                try {
                    KernelConfig cfg = effective_config(scenario, config_path, ar.seed);
                    cfg.memory.store_path.clear();  // snapshot owns persistence
                    if (cfg.memory.dimension != base_config.memory.dimension) {
                        fail(Errc::bad_config, "scenario may not change the embedding dimension");
                    }
                    ScriptedBackend backend(scenario, ar.seed);
                    ScriptedSummarizer summarizer(scenario);
                    ToolRegistry tools = build_scripted_tools(scenario, cfg);
                    auto run = runtime::run_task(scenario.task, cfg, backend, tools, *task_store,
                                                 summarizer);
                    ar.answer = run.answer.answer;
                    ar.confidence = run.answer.confidence;
                    ar.passed = scenario.expected_answer ? run.answer.answer ==
                                                               *scenario.expected_answer
                                                         : run.answer.confidence > 0.0;
                } catch (const std::exception& ex) {
                    ar.passed = false;
                    ar.error = ex.what();
                }
                tr.attempts.push_back(std::move(ar));
            }
            // Entries adopted during the task's attempts are merged later.
            const auto entries = task_store->entries();
            for (std::size_t i = before_snapshot; i < entries.size(); ++i) {
                write_backs[index].push_back(entries[i]);
            }
        } catch (const std::exception& ex) {
            for (int a = 0; a < attempts; ++a) {
                AttemptResult ar;
                ar.seed = base_config.runtime.seed + a;
                ar.error = ex.what();
                tr.attempts.push_back(std::move(ar));
            }
        }
        for (const auto& a : tr.attempts) tr.passed = tr.passed || a.passed;
        result.tasks[index] = std::move(tr);

        log_event("end", index, in_flight.load() - 1);
        --in_flight;
        slots.release();
    };

    std::vector<std::thread> threads;
    threads.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        threads.emplace_back(run_one_task, i);
    }
    for (auto& t : threads) t.join();

    // Serial write-back merge in declaration order keeps the final store
    // deterministic whatever the completion order was.
    for (const auto& entries : write_backs) {
        for (const auto& e : entries) base_store->store(e);
    }

    result.peak_concurrency = peak.load();
    if (!harness_log_path.empty()) {
        std::ofstream out(harness_log_path, std::ios::binary | std::ios::trunc);
        for (const auto& line : harness_log) out << line.dump() << '\n';
        json tail{{"event", "peak"}, {"peak_concurrency", result.peak_concurrency}};
        out << tail.dump() << '\n';
    }
    return result;
}

}  // namespace agentk::report
