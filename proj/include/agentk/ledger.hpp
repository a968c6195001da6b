#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentk/common.hpp"

namespace agentk::ledger {

struct LedgerConfig {
    std::size_t tau_max = 4000;      // per tool output
    std::size_t tau_multi = 12000;   // per round
    std::size_t tau_context = 64000; // whole history
    std::size_t summary_cap = 2000;

    void validate() const;
};

enum class RecordKind { note, tool, round_summary, node_summary, history_summary };

const char* record_kind_name(RecordKind k);

inline bool is_summary_kind(RecordKind k) {
    return k == RecordKind::round_summary || k == RecordKind::node_summary ||
           k == RecordKind::history_summary;
}

struct LedgerRecord {
    std::string record_id;
    RecordKind kind = RecordKind::note;
    int round = 0;
    std::string tool_name;
    std::string sub_query;
    std::string content;        // stored payload, marker excluded
    bool truncated = false;
    std::size_t original_length = 0;
    std::string marker;         // appended after content when rendering

    std::size_t stored_length() const { return content.size() + marker.size(); }
    std::string rendered() const { return content + marker; }
};

struct RegistryEntry {
    std::string tool_name;
    int round = 0;
    std::size_t original_length = 0;
};

/// Secondary summarization hook. Returning nullopt means the summarizer is
/// unavailable and the mechanical fallback takes over (flagged in reports).
class Summarizer {
public:
    struct Request {
        std::string purpose;  // "round" | "node" | "merge"
        std::string owner;    // subagent id
        int round = 0;
        std::string input;
        std::size_t cap = 0;
    };

    virtual ~Summarizer() = default;
    virtual std::optional<std::string> summarize(const Request& request) = 0;
};

/// Head-plus-tail extraction; never unavailable.
class MechanicalSummarizer final : public Summarizer {
public:
    std::optional<std::string> summarize(const Request& request) override;
    static std::string head_tail(const std::string& input, std::size_t cap);
};

struct RoundClosure {
    bool summarized = false;
    bool fallback = false;  // mechanical path used
    std::size_t before = 0;
    std::size_t after = 0;
    int round = 0;
    std::string summary_record_id;
    std::vector<std::string> reconstructed_ids;  // truncated records flagged first
};

struct CompressionReport {
    bool triggered = false;
    bool fallback_round = false;    // oldest verbatim round summarized instead
    bool merged_summaries = false;  // last-resort merge of old summaries
    bool mechanical = false;        // summarizer was unavailable for >=1 node
    std::size_t before = 0;
    std::size_t after = 0;
    std::vector<std::string> replaced_ids;
    int compressed_round = -1;
};

/// Single-owner interaction history for one subagent. Tier 1 truncates
/// oversized records on entry and registers them; tier 2 collapses heavy
/// multi-tool rounds; tier 3 retroactively replaces registered nodes (or,
/// with an empty registry, the oldest verbatim round) until the history is
/// back under budget.
class Ledger {
public:
    Ledger(LedgerConfig config, std::string owner_id);

    const LedgerConfig& config() const { return config_; }
    const std::string& owner() const { return owner_; }

    void begin_round(int round);
    int current_round() const { return current_round_; }

    const LedgerRecord& add_note(const std::string& text);
    const LedgerRecord& record_tool_result(const std::string& tool_name,
                                           const std::string& sub_query,
                                           const std::string& raw_output);

    RoundClosure close_round(Summarizer& summarizer);
    CompressionReport compress_history(Summarizer& summarizer);
    /// Re-applies compress_history until total <= tau_context (or no
    /// progress is possible, which only happens on an empty ledger).
    std::vector<CompressionReport> enforce_budget(Summarizer& summarizer);

    struct Measure {
        std::size_t total_chars = 0;
        std::vector<std::pair<int, std::size_t>> per_round_chars;  // ascending round
        std::size_t registry_size = 0;
    };
    Measure measure() const;
    std::size_t total_chars() const;

    std::vector<std::string> render_context(std::size_t budget) const;

    const std::vector<LedgerRecord>& records() const { return records_; }
    const std::map<std::string, RegistryEntry>& registry() const { return registry_; }

    json snapshot() const;

    static std::string truncation_marker(std::size_t kept, std::size_t original,
                                         const std::string& record_id);

private:
    LedgerRecord& store_record(RecordKind kind, const std::string& tool_name,
                               const std::string& sub_query, const std::string& raw);
    std::string next_id();
    std::string summarize_or_fallback(Summarizer& s, const Summarizer::Request& req, bool* fell_back);

    LedgerConfig config_;
    std::string owner_;
    std::vector<LedgerRecord> records_;
    std::map<std::string, RegistryEntry> registry_;
    int current_round_ = 0;
    std::uint64_t next_record_ = 1;
};

}  // namespace agentk::ledger
