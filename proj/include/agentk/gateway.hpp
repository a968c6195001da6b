#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agentk/clock.hpp"
#include "agentk/common.hpp"

namespace agentk::gateway {

struct Document {
    std::string url;
    std::string title;
    std::string body;
};

enum class ErrorKind { timeout, malformed_query, not_found, rate_limited, parse_failure, network };

const char* error_kind_name(ErrorKind k);
std::optional<ErrorKind> error_kind_from_name(const std::string& name);

/// timeout / rate_limited / network may succeed on retry; the rest are
/// deterministic for a given query and skip straight to the next tier.
bool is_retryable(ErrorKind k);

struct SourceReply {
    bool ok = false;
    Document doc;
    ErrorKind error = ErrorKind::network;
};

class SourceClient {
public:
    virtual ~SourceClient() = default;
    virtual SourceReply request(const std::string& query) = 0;
};

struct SourceTier {
    int tier_index = 0;
    std::string name;
    int max_retries = 0;  // 0 = take the policy default
    std::shared_ptr<SourceClient> client;
};

struct BackoffPolicy {
    std::int64_t base_delay_ms = 500;
    double factor = 2.0;
    int max_retries = 3;
    bool jitter = false;  // always off in deterministic mode

    /// Delay before retry n (n = 1 for the first retry): base * factor^(n-1).
    std::int64_t delay_before_retry_ms(int retry_number) const;
};

struct AttemptRecord {
    int tier = 0;
    int attempt = 0;  // 1-based within the tier
    bool ok = false;
    ErrorKind error = ErrorKind::network;
    std::int64_t delay_before_ms = 0;
};

struct Diagnostic {
    ErrorKind error_kind = ErrorKind::network;
    std::string suggestion;
    std::vector<AttemptRecord> attempts_log;
};

struct FetchReport {
    std::optional<Document> document;
    std::optional<Diagnostic> diagnostic;
    std::vector<AttemptRecord> attempts;

    bool ok() const { return document.has_value(); }
};

/// Ordered regex-free cleanup rules applied to a fixpoint: enclosing
/// quotes/markup stripped, whitespace collapsed, dangling boolean
/// operators removed, length capped. Idempotent by construction.
std::string sanitize_query(const std::string& raw);

using SuggestionTable = std::map<ErrorKind, std::string>;
const SuggestionTable& default_suggestions();
SuggestionTable load_suggestion_table(const std::string& path);

Diagnostic diagnose(const std::vector<AttemptRecord>& attempts_log);
Diagnostic diagnose(const std::vector<AttemptRecord>& attempts_log, const SuggestionTable& table);

/// Strict tier order with per-tier exponential backoff. Never throws: a
/// total failure comes back as a Diagnostic with the full attempts log.
FetchReport fetch(const std::string& query, const std::vector<SourceTier>& tiers,
                  const BackoffPolicy& policy, SleepClock& clock);

/// Order-preserving duplicate removal: exact bodies first, then character
/// shingle overlap (|A∩B| / min(|A|,|B|)) against every kept survivor.
std::vector<Document> filter_redundant(const std::vector<Document>& docs,
                                       double overlap_threshold = 0.8,
                                       std::size_t shingle_len = 8);

double shingle_overlap(const std::string& a, const std::string& b, std::size_t shingle_len = 8);

/// Test/scenario source that replays a fixed outcome script; exhausting
/// the script repeats the last outcome.
class ScriptedSource final : public SourceClient {
public:
    explicit ScriptedSource(std::vector<SourceReply> script) : script_(std::move(script)) {}
    SourceReply request(const std::string& query) override;

    static SourceReply ok_reply(const std::string& body, const std::string& url = "");
    static SourceReply err_reply(ErrorKind kind);

private:
    std::vector<SourceReply> script_;
    std::size_t cursor_ = 0;
    std::mutex mu_;
};

/// The conventional chain: a structured reader, then a broad search
/// service, then raw fetch as the final contingency.
std::vector<SourceTier> make_tiers(std::shared_ptr<SourceClient> structured_reader,
                                   std::shared_ptr<SourceClient> broad_search,
                                   std::shared_ptr<SourceClient> raw_fetch, int max_retries = 0);

}  // namespace agentk::gateway
