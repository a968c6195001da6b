#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "agentk/common.hpp"

namespace agentk {

struct TraceEvent {
    std::uint64_t seq = 0;
    std::int64_t wall_offset_ms = 0;
    std::string kind;
    json payload;

    json to_json() const;
    static TraceEvent from_json(const json& j);
};

/// An event buffer built by one subagent. Fragments are merged into the
/// run trace at the join point, in declaration order, so two runs of the
/// same scenario emit byte-identical traces no matter how the worker
/// threads interleave.
struct PendingEvent {
    std::int64_t wall_offset_ms = 0;
    std::string kind;
    json payload;
};

using TraceFragment = std::vector<PendingEvent>;

class Trace {
public:
    Trace() = default;
    Trace(std::string trace_id, std::int64_t seed) : trace_id_(std::move(trace_id)), seed_(seed) {}

    Trace(Trace&& other) noexcept;
    Trace& operator=(Trace&& other) noexcept;
    Trace(const Trace&) = delete;
    Trace& operator=(const Trace&) = delete;

    const std::string& trace_id() const { return trace_id_; }
    std::int64_t seed() const { return seed_; }

    std::uint64_t append(const std::string& kind, json payload, std::int64_t wall_offset_ms);
    void append_fragment(const TraceFragment& fragment);

    const std::vector<TraceEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

    /// One event per line, keys in sorted order; stable bytes for diffing.
    std::string to_jsonl() const;
    void write_file(const std::string& path) const;
    static std::vector<TraceEvent> read_file(const std::string& path);

private:
    std::string trace_id_;
    std::int64_t seed_ = 0;
    std::vector<TraceEvent> events_;
    mutable std::mutex mu_;
};

}  // namespace agentk
