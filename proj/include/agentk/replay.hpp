#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "agentk/ledger.hpp"
#include "agentk/memory.hpp"
#include "agentk/model.hpp"
#include "agentk/runtime.hpp"
#include "agentk/tools.hpp"
#include "agentk/trace.hpp"

namespace agentk::replay {

/// Serves model replies from a recorded trace. Keys collide only across
/// main rounds, which run sequentially, so FIFO-per-key is deterministic.
/// A missing key reproduces the original backend fault.
class ReplayBackend final : public ModelBackend {
public:
    explicit ReplayBackend(const std::vector<TraceEvent>& events);

    ModelReply complete(const ModelRequest& request) override;
    std::vector<SkillDraft> extract(const ExtractRequest& request) override;

private:
    std::map<std::string, std::deque<std::pair<json, std::int64_t>>> replies_;
    std::vector<SkillDraft> drafts_;
    bool extract_failed_ = false;
    std::mutex mu_;
};

class ReplaySummarizer final : public ledger::Summarizer {
public:
    explicit ReplaySummarizer(const std::vector<TraceEvent>& events);
    std::optional<std::string> summarize(const Request& request) override;

private:
    std::map<std::string, std::deque<std::pair<bool, std::string>>> calls_;
    std::mutex mu_;
};

class ReplayMemoryStore final : public memory::MemoryStore {
public:
    ReplayMemoryStore(std::shared_ptr<memory::Embedder> embedder, memory::MemoryConfig config,
                      const std::vector<TraceEvent>& events);

    memory::RetrievalResult retrieve(const std::string& query, std::size_t k,
                                     double theta_read) const override;
    bool store(memory::MemoryEntry entry) override;

private:
    mutable std::deque<memory::RetrievalResult> loads_;
    std::deque<bool> writes_;
    mutable std::mutex mu_;
};

ToolRegistry build_replay_tools(const std::vector<TraceEvent>& events);

struct ReplayResult {
    bool ok = false;
    std::size_t checked = 0;
    std::size_t divergence_index = 0;  // valid when !ok
    std::string expected;
    std::string actual;
};

/// Re-executes a recorded run against trace-fed backends and verifies the
/// regenerated event stream byte-for-byte against the recording.
ReplayResult replay_events(const std::vector<TraceEvent>& events);
ReplayResult replay_file(const std::string& trace_path);

}  // namespace agentk::replay
