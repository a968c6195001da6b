#include <doctest.h>

#include <random>
#include <set>

#include "agentk/clock.hpp"
#include "agentk/gateway.hpp"

using namespace agentk;
using namespace agentk::gateway;

namespace {

std::vector<SourceTier> tiers_from_scripts(std::vector<std::vector<SourceReply>> scripts) {
    std::vector<SourceTier> tiers;
    for (std::size_t i = 0; i < scripts.size(); ++i) {
        tiers.push_back(SourceTier{static_cast<int>(i), "tier" + std::to_string(i), 0,
                                   std::make_shared<ScriptedSource>(std::move(scripts[i]))});
    }
    return tiers;
}

}  // namespace

TEST_CASE("sanitize: whitespace collapse and trim") {
    CHECK(sanitize_query("  weather   today ") == "weather today");
    CHECK(sanitize_query("a\tb\nc") == "a b c");
}

TEST_CASE("sanitize: already-clean query unchanged") {
    CHECK(sanitize_query("weather today") == "weather today");
}

TEST_CASE("sanitize: enclosing quotes and markup stripped") {
    CHECK(sanitize_query("\"weather today\"") == "weather today");
    CHECK(sanitize_query("“smart quotes”") == "smart quotes");
    CHECK(sanitize_query("``nested``") == "nested");
    CHECK(sanitize_query("[bracketed query]") == "bracketed query");
    // Interior quotes stay.
    CHECK(sanitize_query("say \"hi\" now") == "say \"hi\" now");
}

TEST_CASE("sanitize: operator typos removed") {
    CHECK(sanitize_query("cats AND AND dogs") == "cats AND dogs");
    CHECK(sanitize_query("AND cats") == "cats");
    CHECK(sanitize_query("cats AND OR") == "cats");
}

TEST_CASE("sanitize: empty after cleanup raises") {
    CHECK_THROWS_AS(sanitize_query("\"\""), KernelError);
    CHECK_THROWS_AS(sanitize_query("   "), KernelError);
    CHECK_THROWS_AS(sanitize_query("NOT"), KernelError);
    try {
        sanitize_query("''");
        FAIL("expected EmptyAfterSanitize");
    } catch (const KernelError& e) {
        CHECK(e.code() == Errc::empty_after_sanitize);
    }
}

TEST_CASE("sanitize: idempotent on random inputs") {
    std::mt19937_64 rng(7);
    const std::string charset = "abc ABC\"'`“”() []<>AND OR NOT\t\n-:+";
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const std::size_t len = rng() % 60;
        for (std::size_t j = 0; j < len; ++j) s.push_back(charset[rng() % charset.size()]);
        std::string once;
        try {
            once = sanitize_query(s);
        } catch (const KernelError&) {
            continue;  // emptied out; nothing to re-check
        }
        CHECK(sanitize_query(once) == once);
    }
}

TEST_CASE("sanitize: long queries capped") {
    const std::string big(5000, 'q');
    const std::string cleaned = sanitize_query(big);
    CHECK(cleaned.size() <= 512);
    CHECK(sanitize_query(cleaned) == cleaned);
}

TEST_CASE("backoff delays follow base * factor^(n-1)") {
    BackoffPolicy policy;  // 500ms base, factor 2
    CHECK(policy.delay_before_retry_ms(1) == 500);
    CHECK(policy.delay_before_retry_ms(2) == 1000);
    CHECK(policy.delay_before_retry_ms(3) == 2000);
}

TEST_CASE("fetch: two failures then success stays in tier 0 with exact delays") {
    auto tiers = tiers_from_scripts({
        {ScriptedSource::err_reply(ErrorKind::timeout), ScriptedSource::err_reply(ErrorKind::timeout),
         ScriptedSource::ok_reply("payload")},
        {ScriptedSource::ok_reply("unused")},
        {ScriptedSource::ok_reply("unused")},
    });
    BackoffPolicy policy;
    VirtualClock clock;
    const auto report = fetch("q", tiers, policy, clock);
    REQUIRE(report.ok());
    CHECK(report.document->body == "payload");
    REQUIRE(report.attempts.size() == 3);
    for (const auto& a : report.attempts) CHECK(a.tier == 0);
    CHECK(clock.sleeps() == std::vector<std::int64_t>{500, 1000});
}

TEST_CASE("fetch: dead tier 0 falls through to tier 1") {
    auto tiers = tiers_from_scripts({
        {ScriptedSource::err_reply(ErrorKind::network)},
        {ScriptedSource::ok_reply("rescued")},
        {ScriptedSource::ok_reply("unused")},
    });
    BackoffPolicy policy;
    VirtualClock clock;
    const auto report = fetch("q", tiers, policy, clock);
    REQUIRE(report.ok());
    CHECK(report.document->body == "rescued");
    REQUIRE(report.attempts.size() == 4);  // 3 tier-0 failures + 1 tier-1 success
    CHECK(report.attempts[2].tier == 0);
    CHECK(report.attempts[3].tier == 1);
    CHECK(report.attempts[3].ok);
}

TEST_CASE("fetch: all tiers down yields diagnostic with 9 attempts") {
    auto tiers = tiers_from_scripts({
        {ScriptedSource::err_reply(ErrorKind::timeout)},
        {ScriptedSource::err_reply(ErrorKind::timeout)},
        {ScriptedSource::err_reply(ErrorKind::timeout)},
    });
    BackoffPolicy policy;
    VirtualClock clock;
    const auto report = fetch("q", tiers, policy, clock);
    REQUIRE_FALSE(report.ok());
    REQUIRE(report.diagnostic.has_value());
    CHECK(report.attempts.size() == 9);
    CHECK_FALSE(report.diagnostic->suggestion.empty());
    CHECK(report.diagnostic->error_kind == ErrorKind::timeout);
    CHECK(report.diagnostic->attempts_log.size() == 9);
}

TEST_CASE("fetch: deterministic failures skip retries within a tier") {
    auto tiers = tiers_from_scripts({
        {ScriptedSource::err_reply(ErrorKind::malformed_query)},
        {ScriptedSource::err_reply(ErrorKind::parse_failure)},
        {ScriptedSource::ok_reply("third time")},
    });
    BackoffPolicy policy;
    VirtualClock clock;
    const auto report = fetch("q", tiers, policy, clock);
    REQUIRE(report.ok());
    REQUIRE(report.attempts.size() == 3);  // one attempt per tier, no backoff sleeps
    CHECK(clock.sleeps().empty());
}

TEST_CASE("diagnose: dominant kind of the final tier with table suggestion") {
    std::vector<AttemptRecord> log = {
        {0, 1, false, ErrorKind::timeout, 0},
        {0, 2, false, ErrorKind::timeout, 500},
        {1, 1, false, ErrorKind::rate_limited, 0},
    };
    const auto d = diagnose(log);
    CHECK(d.error_kind == ErrorKind::rate_limited);
    CHECK(d.suggestion == default_suggestions().at(ErrorKind::rate_limited));

    log = {{2, 1, false, ErrorKind::parse_failure, 0}};
    CHECK(diagnose(log).error_kind == ErrorKind::parse_failure);

    log = {
        {2, 1, false, ErrorKind::timeout, 0},
        {2, 2, false, ErrorKind::timeout, 500},
        {2, 3, false, ErrorKind::rate_limited, 1000},
    };
    CHECK(diagnose(log).error_kind == ErrorKind::timeout);
}

TEST_CASE("suggestion table loads from the shipped data file") {
    const auto table =
        load_suggestion_table(std::string(PROJECT_SOURCE_DIR) + "/data/suggestions.json");
    CHECK(table.at(ErrorKind::malformed_query) ==
          default_suggestions().at(ErrorKind::malformed_query));
    CHECK(table.size() == 6);
}

TEST_CASE("filter_redundant: exact duplicates and order preservation") {
    Document d1{"", "", "the quick brown fox jumps over the lazy dog"};
    Document d2{"", "", "completely different content about harbors and tides"};
    const auto out = filter_redundant({d1, d1, d2, d1});
    REQUIRE(out.size() == 2);
    CHECK(out[0].body == d1.body);
    CHECK(out[1].body == d2.body);
    CHECK(filter_redundant({}).empty());
}

TEST_CASE("filter_redundant: near duplicates removed, first kept") {
    const std::string base = "shared prefix that is quite long and detailed about the topic at hand";
    Document a{"", "", base + " version one"};
    Document b{"", "", base + " version two"};
    Document c{"", "", "totally unrelated text with no shared shingles whatsoever here"};
    const auto out = filter_redundant({a, b, c}, 0.8, 8);
    REQUIRE(out.size() == 2);
    CHECK(out[0].body == a.body);
    CHECK(out[1].body == c.body);
}

// Independent pairwise oracle: greedy keep-first over std::set shingles.
namespace {
std::set<std::string> oracle_shingles(const std::string& s, std::size_t len) {
    std::set<std::string> out;
    if (s.empty()) return out;
    if (s.size() <= len) {
        out.insert(s);
        return out;
    }
    for (std::size_t i = 0; i + len <= s.size(); ++i) out.insert(s.substr(i, len));
    return out;
}

std::vector<Document> oracle_filter(const std::vector<Document>& docs, double threshold,
                                    std::size_t len) {
    std::vector<Document> kept;
    for (const auto& d : docs) {
        bool dup = false;
        for (const auto& k : kept) {
            if (k.body == d.body) {
                dup = true;
                break;
            }
            const auto sa = oracle_shingles(d.body, len);
            const auto sb = oracle_shingles(k.body, len);
            if (sa.empty() || sb.empty()) continue;
            std::size_t inter = 0;
            for (const auto& s : sa) inter += sb.count(s);
            const double overlap =
                static_cast<double>(inter) / static_cast<double>(std::min(sa.size(), sb.size()));
            if (overlap >= threshold) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back(d);
    }
    return kept;
}
}  // namespace

TEST_CASE("filter_redundant matches the pairwise oracle on random corpora") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> fragments = {
        "alpha beta gamma delta", "epsilon zeta eta theta", "iota kappa lambda mu",
        "nu xi omicron pi rho",   "sigma tau upsilon phi"};
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<Document> docs;
        const int n = 2 + static_cast<int>(rng() % 9);
        for (int i = 0; i < n; ++i) {
            std::string body = fragments[rng() % fragments.size()];
            if (rng() % 2) body += " " + fragments[rng() % fragments.size()];
            if (rng() % 3 == 0) body += " unique" + std::to_string(rng() % 1000);
            docs.push_back(Document{"", "", body});
        }
        const auto expected = oracle_filter(docs, 0.8, 8);
        const auto actual = filter_redundant(docs, 0.8, 8);
        REQUIRE(actual.size() == expected.size());
        for (std::size_t i = 0; i < actual.size(); ++i) CHECK(actual[i].body == expected[i].body);
    }
}

TEST_CASE("fetch never raises: exception-throwing client becomes a network error") {
    struct ThrowingSource final : SourceClient {
        SourceReply request(const std::string&) override { throw std::runtime_error("boom"); }
    };
    std::vector<SourceTier> tiers = {{0, "explosive", 0, std::make_shared<ThrowingSource>()}};
    BackoffPolicy policy;
    VirtualClock clock;
    const auto report = fetch("q", tiers, policy, clock);
    REQUIRE_FALSE(report.ok());
    CHECK(report.diagnostic->error_kind == ErrorKind::network);
    CHECK_FALSE(report.diagnostic->suggestion.empty());
}
