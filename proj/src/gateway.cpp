#include "agentk/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace agentk::gateway {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::timeout: return "timeout";
        case ErrorKind::malformed_query: return "malformed_query";
        case ErrorKind::not_found: return "not_found";
        case ErrorKind::rate_limited: return "rate_limited";
        case ErrorKind::parse_failure: return "parse_failure";
        case ErrorKind::network: return "network";
    }
    return "unknown";
}

std::optional<ErrorKind> error_kind_from_name(const std::string& name) {
    if (name == "timeout") return ErrorKind::timeout;
    if (name == "malformed_query") return ErrorKind::malformed_query;
    if (name == "not_found") return ErrorKind::not_found;
    if (name == "rate_limited") return ErrorKind::rate_limited;
    if (name == "parse_failure") return ErrorKind::parse_failure;
    if (name == "network") return ErrorKind::network;
    return std::nullopt;
}

bool is_retryable(ErrorKind k) {
    return k == ErrorKind::timeout || k == ErrorKind::rate_limited || k == ErrorKind::network;
}

std::int64_t BackoffPolicy::delay_before_retry_ms(int retry_number) const {
    double delay = static_cast<double>(base_delay_ms);
    for (int i = 1; i < retry_number; ++i) delay *= factor;
    return static_cast<std::int64_t>(std::llround(delay));
}

// ---- sanitization -----------------------------------------------------------

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::string strip_enclosing(const std::string& s) {
    static const std::vector<std::pair<std::string, std::string>> pairs = {
        {"\"", "\""}, {"'", "'"}, {"`", "`"}, {"“", "”"}, {"‘", "’"}, {"«", "»"},
        {"(", ")"},  {"[", "]"}, {"<", ">"},
    };
    std::string cur = s;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [open, close] : pairs) {
            if (cur.size() >= open.size() + close.size() &&
                cur.compare(0, open.size(), open) == 0 &&
                cur.compare(cur.size() - close.size(), close.size(), close) == 0) {
                cur = cur.substr(open.size(), cur.size() - open.size() - close.size());
                cur = trim(cur);
                changed = true;
                break;
            }
        }
    }
    return cur;
}

std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (char c : s) {
        if (is_space(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

bool is_operator_token(const std::string& t) { return t == "AND" || t == "OR" || t == "NOT"; }

std::string fix_operators(const std::string& s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : s) {
        if (c == ' ') {
            if (!cur.empty()) tokens.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(cur);

    // Consecutive duplicate operators collapse to one.
    std::vector<std::string> dedup;
    for (const auto& t : tokens) {
        if (!dedup.empty() && is_operator_token(t) && dedup.back() == t) continue;
        dedup.push_back(t);
    }
    // Dangling operators at either end are dropped to a fixpoint.
    while (!dedup.empty() && is_operator_token(dedup.front())) dedup.erase(dedup.begin());
    while (!dedup.empty() && is_operator_token(dedup.back())) dedup.pop_back();

    std::string out;
    for (const auto& t : dedup) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

constexpr std::size_t kQueryCap = 512;

std::string sanitize_once(const std::string& raw) {
    std::string s = trim(raw);
    s = strip_enclosing(s);
    s = collapse_whitespace(s);
    s = fix_operators(s);
    if (s.size() > kQueryCap) s = trim(s.substr(0, kQueryCap));
    return s;
}

}  // namespace

std::string sanitize_query(const std::string& raw) {
    std::string cur = raw;
    for (int pass = 0; pass < 8; ++pass) {
        std::string next = sanitize_once(cur);
        if (next == cur) break;
        cur = std::move(next);
    }
    if (cur.empty()) fail(Errc::empty_after_sanitize, "query empty after sanitization");
    return cur;
}

// ---- diagnostics ------------------------------------------------------------

const SuggestionTable& default_suggestions() {
    static const SuggestionTable table = {
        {ErrorKind::timeout,
         "sources timed out; retry later or narrow the query to reduce result size"},
        {ErrorKind::malformed_query,
         "reformulate the query with fewer operators and plain keywords"},
        {ErrorKind::not_found,
         "no source had this content; broaden the phrasing or try alternative keywords"},
        {ErrorKind::rate_limited,
         "request rate exceeded; back off before reissuing or reduce parallel queries"},
        {ErrorKind::parse_failure,
         "content could not be parsed; request the raw page or a different format"},
        {ErrorKind::network,
         "network path failed on every tier; verify connectivity before retrying"},
    };
    return table;
}

SuggestionTable load_suggestion_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open suggestion table: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(Errc::io_error, "malformed suggestion table: " + path);
    SuggestionTable table = default_suggestions();
    for (const auto& [key, value] : j.items()) {
        const auto kind = error_kind_from_name(key);
        if (!kind || !value.is_string()) fail(Errc::io_error, "bad suggestion entry: " + key);
        table[*kind] = value.get<std::string>();
    }
    return table;
}

Diagnostic diagnose(const std::vector<AttemptRecord>& attempts_log) {
    return diagnose(attempts_log, default_suggestions());
}

Diagnostic diagnose(const std::vector<AttemptRecord>& attempts_log, const SuggestionTable& table) {
    if (attempts_log.empty()) fail(Errc::invalid_argument, "diagnose on empty attempts log");
    const int final_tier = attempts_log.back().tier;

    // Dominant failure class of the final tier; ties go to the later kind.
    std::map<ErrorKind, int> counts;
    std::vector<ErrorKind> order;
    for (const auto& a : attempts_log) {
        if (a.tier != final_tier || a.ok) continue;
        ++counts[a.error];
        order.push_back(a.error);
    }
    ErrorKind dominant = attempts_log.back().error;
    int best = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (counts[*it] > best) {
            best = counts[*it];
            dominant = *it;
        }
    }

    Diagnostic d;
    d.error_kind = dominant;
    d.attempts_log = attempts_log;
    auto it = table.find(dominant);
    d.suggestion = it != table.end() ? it->second : default_suggestions().at(dominant);
    return d;
}

FetchReport fetch(const std::string& query, const std::vector<SourceTier>& tiers,
                  const BackoffPolicy& policy, SleepClock& clock) {
    FetchReport report;
    if (tiers.empty()) {
        Diagnostic d;
        d.error_kind = ErrorKind::network;
        d.suggestion = default_suggestions().at(ErrorKind::network);
        report.diagnostic = d;
        return report;
    }
    for (const auto& tier : tiers) {
        const int budget = tier.max_retries > 0 ? tier.max_retries : policy.max_retries;
        for (int attempt = 1; attempt <= budget; ++attempt) {
            std::int64_t delay = 0;
            if (attempt > 1) {
                delay = policy.delay_before_retry_ms(attempt - 1);
                clock.sleep_ms(delay);
            }
            SourceReply r;
            try {
                r = tier.client->request(query);
            } catch (const std::exception&) {
                r.ok = false;
                r.error = ErrorKind::network;
            }
            report.attempts.push_back({tier.tier_index, attempt, r.ok, r.error, delay});
            if (r.ok) {
                report.document = std::move(r.doc);
                return report;
            }
            if (!is_retryable(r.error)) break;
        }
    }
    report.diagnostic = diagnose(report.attempts);
    return report;
}

// ---- redundancy filtering ---------------------------------------------------

namespace {

std::unordered_set<std::string> shingles_of(const std::string& body, std::size_t len) {
    std::unordered_set<std::string> out;
    if (body.empty()) return out;
    if (body.size() <= len) {
        out.insert(body);
        return out;
    }
    for (std::size_t i = 0; i + len <= body.size(); ++i) {
        out.insert(body.substr(i, len));
    }
    return out;
}

}  // namespace

double shingle_overlap(const std::string& a, const std::string& b, std::size_t shingle_len) {
    const auto sa = shingles_of(a, shingle_len);
    const auto sb = shingles_of(b, shingle_len);
    if (sa.empty() || sb.empty()) return a == b ? 1.0 : 0.0;
    const auto& small = sa.size() <= sb.size() ? sa : sb;
    const auto& large = sa.size() <= sb.size() ? sb : sa;
    std::size_t inter = 0;
    for (const auto& s : small) {
        if (large.count(s)) ++inter;
    }
    return static_cast<double>(inter) / static_cast<double>(small.size());
}

std::vector<Document> filter_redundant(const std::vector<Document>& docs, double overlap_threshold,
                                       std::size_t shingle_len) {
    std::vector<Document> kept;
    std::vector<std::unordered_set<std::string>> kept_shingles;
    for (const auto& doc : docs) {
        bool duplicate = false;
        const auto sh = shingles_of(doc.body, shingle_len);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (kept[i].body == doc.body) {
                duplicate = true;
                break;
            }
            if (sh.empty() || kept_shingles[i].empty()) continue;
            const auto& small = sh.size() <= kept_shingles[i].size() ? sh : kept_shingles[i];
            const auto& large = sh.size() <= kept_shingles[i].size() ? kept_shingles[i] : sh;
            std::size_t inter = 0;
            for (const auto& s : small) {
                if (large.count(s)) ++inter;
            }
            const double overlap = static_cast<double>(inter) / static_cast<double>(small.size());
            if (overlap >= overlap_threshold) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            kept.push_back(doc);
            kept_shingles.push_back(std::move(sh));
        }
    }
    return kept;
}

SourceReply ScriptedSource::request(const std::string&) {
    std::lock_guard<std::mutex> lock(mu_);
    if (script_.empty()) return err_reply(ErrorKind::network);
    const std::size_t i = std::min(cursor_, script_.size() - 1);
    ++cursor_;
    return script_[i];
}

SourceReply ScriptedSource::ok_reply(const std::string& body, const std::string& url) {
    SourceReply r;
    r.ok = true;
    r.doc = Document{url, "", body};
    return r;
}

SourceReply ScriptedSource::err_reply(ErrorKind kind) {
    SourceReply r;
    r.ok = false;
    r.error = kind;
    return r;
}

std::vector<SourceTier> make_tiers(std::shared_ptr<SourceClient> structured_reader,
                                   std::shared_ptr<SourceClient> broad_search,
                                   std::shared_ptr<SourceClient> raw_fetch, int max_retries) {
    return {
        {0, "structured-reader", max_retries, std::move(structured_reader)},
        {1, "broad-search", max_retries, std::move(broad_search)},
        {2, "raw-fetch", max_retries, std::move(raw_fetch)},
    };
}

}  // namespace agentk::gateway
