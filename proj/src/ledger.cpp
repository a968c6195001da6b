#include "agentk/ledger.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace agentk::ledger {

void LedgerConfig::validate() const {
    if (tau_max == 0 || !(tau_max < tau_multi && tau_multi < tau_context)) {
        fail(Errc::bad_config, "ledger thresholds must satisfy 0 < tau_max < tau_multi < tau_context");
    }
    if (summary_cap == 0) fail(Errc::bad_config, "summary_cap must be positive");
}

const char* record_kind_name(RecordKind k) {
    switch (k) {
        case RecordKind::note: return "note";
        case RecordKind::tool: return "tool";
        case RecordKind::round_summary: return "round_summary";
        case RecordKind::node_summary: return "node_summary";
        case RecordKind::history_summary: return "history_summary";
    }
    return "unknown";
}

std::optional<std::string> MechanicalSummarizer::summarize(const Request& request) {
    return head_tail(request.input, request.cap);
}

std::string MechanicalSummarizer::head_tail(const std::string& input, std::size_t cap) {
    static const std::string kGap = "…[…]…";
    if (input.size() <= cap) return input;
    if (cap <= kGap.size()) return input.substr(0, cap);
    const std::size_t body = cap - kGap.size();
    const std::size_t head = body * 6 / 10;
    const std::size_t tail = body - head;
    return input.substr(0, head) + kGap + input.substr(input.size() - tail);
}

Ledger::Ledger(LedgerConfig config, std::string owner_id)
    : config_(config), owner_(std::move(owner_id)) {
    config_.validate();
}

void Ledger::begin_round(int round) { current_round_ = round; }

std::string Ledger::next_id() { return "r" + std::to_string(next_record_++); }

std::string Ledger::truncation_marker(std::size_t kept, std::size_t original,
                                      const std::string& record_id) {
    std::ostringstream m;
    m << "…[truncated: " << kept << " of " << original << " chars; id=" << record_id << "]";
    return m.str();
}

LedgerRecord& Ledger::store_record(RecordKind kind, const std::string& tool_name,
                                   const std::string& sub_query, const std::string& raw) {
    LedgerRecord rec;
    rec.record_id = next_id();
    rec.kind = kind;
    rec.round = current_round_;
    rec.tool_name = tool_name;
    rec.sub_query = sub_query;
    rec.original_length = raw.size();
    if (raw.size() > config_.tau_max) {
        rec.content = raw.substr(0, config_.tau_max);
        rec.truncated = true;
        rec.marker = truncation_marker(config_.tau_max, raw.size(), rec.record_id);
        registry_[rec.record_id] = RegistryEntry{tool_name, current_round_, raw.size()};
    } else {
        rec.content = raw;
    }
    records_.push_back(std::move(rec));
    return records_.back();
}

const LedgerRecord& Ledger::add_note(const std::string& text) {
    return store_record(RecordKind::note, "", "", text);
}

const LedgerRecord& Ledger::record_tool_result(const std::string& tool_name,
                                               const std::string& sub_query,
                                               const std::string& raw_output) {
    return store_record(RecordKind::tool, tool_name, sub_query, raw_output);
}

std::string Ledger::summarize_or_fallback(Summarizer& s, const Summarizer::Request& req,
                                          bool* fell_back) {
    auto out = s.summarize(req);
    if (!out.has_value()) {
        if (fell_back) *fell_back = true;
        out = MechanicalSummarizer::head_tail(req.input, req.cap);
    }
    std::string text = std::move(*out);
    if (text.size() > req.cap) text.resize(req.cap);
    return text;
}

RoundClosure Ledger::close_round(Summarizer& summarizer) {
    RoundClosure closure;
    closure.round = current_round_;

    std::vector<std::size_t> tool_idx;
    std::size_t weight = 0;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        if (r.round == current_round_ && r.kind == RecordKind::tool) {
            tool_idx.push_back(i);
            weight += r.stored_length() + r.sub_query.size();
        }
    }
    closure.before = weight;
    closure.after = weight;
    if (tool_idx.size() <= 1 || weight <= config_.tau_multi) {
        return closure;  // single-tool rounds are never collapsed
    }

    // Truncated records come first in the summarizer input so their
    // reconstruction takes priority over verbatim content.
    std::ostringstream input;
    for (std::size_t i : tool_idx) {
        const auto& r = records_[i];
        if (!r.truncated) continue;
        closure.reconstructed_ids.push_back(r.record_id);
        input << "[reconstruct " << r.record_id << " tool=" << r.tool_name << " original="
              << r.original_length << " chars] q: " << r.sub_query << "\n" << r.content << "\n";
    }
    for (std::size_t i : tool_idx) {
        const auto& r = records_[i];
        if (r.truncated) continue;
        input << "[" << r.record_id << " tool=" << r.tool_name << "] q: " << r.sub_query << "\n"
              << r.content << "\n";
    }

    Summarizer::Request req{"round", owner_, current_round_, input.str(), config_.summary_cap};
    const std::string text = summarize_or_fallback(summarizer, req, &closure.fallback);

    LedgerRecord summary;
    summary.record_id = next_id();
    summary.kind = RecordKind::round_summary;
    summary.round = current_round_;
    summary.content = text;
    summary.original_length = weight;

    for (std::size_t i : tool_idx) registry_.erase(records_[i].record_id);
    const std::size_t insert_at = tool_idx.front();
    std::vector<LedgerRecord> next;
    next.reserve(records_.size() - tool_idx.size() + 1);
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (i == insert_at) next.push_back(summary);
        if (std::find(tool_idx.begin(), tool_idx.end(), i) != tool_idx.end()) continue;
        next.push_back(std::move(records_[i]));
    }
    records_ = std::move(next);

    closure.summarized = true;
    closure.after = summary.stored_length();
    closure.summary_record_id = summary.record_id;
    return closure;
}

CompressionReport Ledger::compress_history(Summarizer& summarizer) {
    CompressionReport report;
    report.before = total_chars();
    report.after = report.before;
    if (report.before <= config_.tau_context) return report;

    if (!registry_.empty()) {
        // Retroactive pass: replace each registered node in place.
        report.triggered = true;
        for (auto& rec : records_) {
            auto it = registry_.find(rec.record_id);
            if (it == registry_.end()) continue;
            std::ostringstream input;
            input << "[node " << rec.record_id << " tool=" << rec.tool_name << " original="
                  << rec.original_length << " chars] q: " << rec.sub_query << "\n" << rec.content;
            const std::size_t shrink_cap =
                std::min(config_.summary_cap, rec.content.size() > 0 ? rec.content.size() - 1 : 0);
            Summarizer::Request req{"node", owner_, rec.round, input.str(), shrink_cap};
            rec.content = summarize_or_fallback(summarizer, req, &report.mechanical);
            rec.marker.clear();
            rec.truncated = false;
            rec.kind = RecordKind::node_summary;
            report.replaced_ids.push_back(rec.record_id);
        }
        registry_.clear();
        report.after = total_chars();
        return report;
    }

    // Registry empty but over budget: collapse the oldest verbatim round.
    std::vector<std::size_t> target_idx;
    int target_round = -1;
    {
        std::map<int, std::vector<std::size_t>> verbatim_by_round;
        std::map<int, std::size_t> weight_by_round;
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& r = records_[i];
            if (is_summary_kind(r.kind)) continue;
            verbatim_by_round[r.round].push_back(i);
            weight_by_round[r.round] += r.stored_length();
        }
        for (const auto& [round, idx] : verbatim_by_round) {
            if (weight_by_round[round] >= 1) {
                target_round = round;
                target_idx = idx;
                break;
            }
        }
    }

    if (target_round >= 0) {
        report.triggered = true;
        report.fallback_round = true;
        report.compressed_round = target_round;
        std::size_t weight = 0;
        std::ostringstream input;
        for (std::size_t i : target_idx) {
            const auto& r = records_[i];
            weight += r.stored_length();
            input << "[" << r.record_id << " " << record_kind_name(r.kind) << "] " << r.rendered()
                  << "\n";
            report.replaced_ids.push_back(r.record_id);
        }
        Summarizer::Request req{"round", owner_, target_round, input.str(),
                                std::min(config_.summary_cap, weight - 1)};
        const std::string text = summarize_or_fallback(summarizer, req, &report.mechanical);

        LedgerRecord summary;
        summary.record_id = next_id();
        summary.kind = RecordKind::history_summary;
        summary.round = target_round;
        summary.content = text;
        summary.original_length = weight;

        const std::size_t insert_at = target_idx.front();
        std::vector<LedgerRecord> next;
        next.reserve(records_.size() - target_idx.size() + 1);
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (i == insert_at) next.push_back(summary);
            if (std::find(target_idx.begin(), target_idx.end(), i) != target_idx.end()) continue;
            next.push_back(std::move(records_[i]));
        }
        records_ = std::move(next);
        report.after = total_chars();
        return report;
    }

    // Everything left is already a summary; merge the two oldest so the
    // budget bound holds unconditionally.
    std::vector<std::size_t> summary_idx;
    for (std::size_t i = 0; i < records_.size() && summary_idx.size() < 2; ++i) {
        if (is_summary_kind(records_[i].kind) && records_[i].stored_length() > 0) {
            summary_idx.push_back(i);
        }
    }
    if (summary_idx.size() < 2) return report;  // nothing compressible

    report.triggered = true;
    report.merged_summaries = true;
    auto& first = records_[summary_idx[0]];
    auto& second = records_[summary_idx[1]];
    const std::size_t combined = first.stored_length() + second.stored_length();
    Summarizer::Request req{"merge", owner_, first.round, first.rendered() + "\n" + second.rendered(),
                            std::min(config_.summary_cap, combined - 1)};
    report.replaced_ids = {first.record_id, second.record_id};
    first.content = summarize_or_fallback(summarizer, req, &report.mechanical);
    first.marker.clear();
    first.kind = RecordKind::history_summary;
    first.original_length = combined;
    records_.erase(records_.begin() + static_cast<std::ptrdiff_t>(summary_idx[1]));
    report.after = total_chars();
    return report;
}

std::vector<CompressionReport> Ledger::enforce_budget(Summarizer& summarizer) {
    std::vector<CompressionReport> reports;
    while (total_chars() > config_.tau_context) {
        CompressionReport r = compress_history(summarizer);
        const bool progressed = r.after < r.before;
        reports.push_back(std::move(r));
        if (!progressed) break;
    }
    return reports;
}

Ledger::Measure Ledger::measure() const {
    Measure m;
    std::map<int, std::size_t> per_round;
    for (const auto& r : records_) {
        m.total_chars += r.stored_length();
        per_round[r.round] += r.stored_length();
    }
    m.per_round_chars.assign(per_round.begin(), per_round.end());
    m.registry_size = registry_.size();
    return m;
}

std::size_t Ledger::total_chars() const {
    std::size_t total = 0;
    for (const auto& r : records_) total += r.stored_length();
    return total;
}

std::vector<std::string> Ledger::render_context(std::size_t budget) const {
    if (budget < config_.summary_cap) {
        fail(Errc::budget_too_small, "render budget " + std::to_string(budget) +
                                         " below summary_cap " +
                                         std::to_string(config_.summary_cap));
    }
    std::vector<std::string> out;
    const std::size_t n = records_.size();
    if (n == 0) return out;

    std::vector<std::size_t> suffix(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
        suffix[i] = suffix[i + 1] + records_[i].stored_length();
    }
    auto elision = [](std::size_t dropped) {
        return "…[elided " + std::to_string(dropped) + " earlier records]";
    };

    std::size_t drop = 0;
    while (drop < n - 1) {
        const std::size_t need = suffix[drop] + (drop == 0 ? 0 : elision(drop).size());
        if (need <= budget) break;
        ++drop;
    }

    if (drop > 0) out.push_back(elision(drop));
    for (std::size_t i = drop; i < n; ++i) out.push_back(records_[i].rendered());

    // Most recent records are never dropped, so if the tail alone still
    // overflows, trim the oldest kept text instead.
    std::size_t total = 0;
    for (const auto& s : out) total += s.size();
    std::size_t cursor = drop > 0 ? 1 : 0;
    while (total > budget && cursor < out.size()) {
        const std::size_t excess = total - budget;
        if (out[cursor].size() <= excess) {
            total -= out[cursor].size();
            out[cursor].clear();
            ++cursor;
        } else {
            out[cursor].resize(out[cursor].size() - excess);
            total = budget;
        }
    }
    return out;
}

json Ledger::snapshot() const {
    json recs = json::array();
    for (const auto& r : records_) {
        recs.push_back(json{{"record_id", r.record_id},
                            {"kind", record_kind_name(r.kind)},
                            {"round", r.round},
                            {"tool", r.tool_name},
                            {"chars", r.stored_length()},
                            {"truncated", r.truncated},
                            {"original_length", r.original_length}});
    }
    return json{{"owner", owner_}, {"total_chars", total_chars()}, {"records", recs}};
}

}  // namespace agentk::ledger
