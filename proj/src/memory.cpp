#include "agentk/memory.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace agentk::memory {

const char* skill_kind_name(SkillKind k) {
    switch (k) {
        case SkillKind::code_snippet: return "code_snippet";
        case SkillKind::tool_usage: return "tool_usage";
        case SkillKind::technical_insight: return "technical_insight";
        case SkillKind::decision_rule: return "decision_rule";
        case SkillKind::workflow_pattern: return "workflow_pattern";
    }
    return "unknown";
}

std::optional<SkillKind> skill_kind_from_name(const std::string& name) {
    if (name == "code_snippet") return SkillKind::code_snippet;
    if (name == "tool_usage") return SkillKind::tool_usage;
    if (name == "technical_insight") return SkillKind::technical_insight;
    if (name == "decision_rule") return SkillKind::decision_rule;
    if (name == "workflow_pattern") return SkillKind::workflow_pattern;
    return std::nullopt;
}

json MemoryEntry::to_json() const {
    return json{{"entry_id", entry_id},
                {"kind", skill_kind_name(kind)},
                {"skill_text", skill_text},
                {"source_trace", source_trace},
                {"task_digest", task_digest},
                {"confidence", confidence},
                {"embedding", embedding},
                {"created_at_ms", created_at_ms}};
}

MemoryEntry MemoryEntry::from_json(const json& j) {
    MemoryEntry e;
    try {
        e.entry_id = j.at("entry_id").get<std::string>();
        auto kind = skill_kind_from_name(j.at("kind").get<std::string>());
        if (!kind) fail(Errc::persistence_failure, "unknown skill kind in store");
        e.kind = *kind;
        e.skill_text = j.at("skill_text").get<std::string>();
        e.source_trace = j.value("source_trace", "");
        e.task_digest = j.value("task_digest", "");
        e.confidence = j.value("confidence", 0.0);
        e.embedding = j.at("embedding").get<std::vector<double>>();
        e.created_at_ms = j.value("created_at_ms", std::int64_t{0});
    } catch (const json::exception& ex) {
        fail(Errc::persistence_failure, std::string("malformed memory entry: ") + ex.what());
    }
    if (e.skill_text.empty()) fail(Errc::persistence_failure, "memory entry with empty skill_text");
    return e;
}

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

}  // namespace

std::vector<double> HashedBagEmbedder::embed(const std::string& text) const {
    if (text.empty()) fail(Errc::invalid_argument, "cannot embed empty text");
    std::vector<double> v(dimension_, 0.0);
    const auto tokens = tokenize(text);
    for (const auto& tok : tokens) {
        const std::uint64_t h = fnv1a64(tok);
        const std::size_t bucket = h % dimension_;
        const double sign = (h >> 63) ? -1.0 : 1.0;
        v[bucket] += sign;
    }
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 == 0.0) {
        v[0] = 1.0;  // tokenless input maps to a fixed sentinel direction
        return v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) fail(Errc::invalid_argument, "embedding dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

void MemoryConfig::validate() const {
    if (k == 0) fail(Errc::bad_config, "memory.k must be >= 1");
    if (dup_count == 0) fail(Errc::bad_config, "memory.dup_count must be >= 1");
    if (dimension == 0) fail(Errc::bad_config, "memory.dimension must be >= 1");
    if (theta_read < -1.0 || theta_read > 1.0) fail(Errc::bad_config, "theta_read outside [-1,1]");
    if (theta_dup < -1.0 || theta_dup > 1.0) fail(Errc::bad_config, "theta_dup outside [-1,1]");
}

bool should_store(const RetrievalResult& retrieval, double theta_dup, std::size_t dup_count) {
    std::size_t high = 0;
    for (const auto& [entry, sim] : retrieval.entries) {
        if (sim >= theta_dup) ++high;
    }
    return high < dup_count;
}

MemoryStore::MemoryStore(std::shared_ptr<Embedder> embedder, MemoryConfig config)
    : embedder_(std::move(embedder)), config_(std::move(config)) {
    config_.validate();
    if (embedder_->dimension() != config_.dimension) {
        fail(Errc::bad_config, "embedder dimension does not match memory config");
    }
}

std::unique_ptr<MemoryStore> MemoryStore::open(std::shared_ptr<Embedder> embedder,
                                               MemoryConfig config) {
    auto store = std::make_unique<MemoryStore>(std::move(embedder), config);
    if (config.store_path.empty()) return store;
    std::ifstream in(config.store_path, std::ios::binary);
    if (!in) return store;  // no file yet: empty store
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            fail(Errc::persistence_failure,
                 "store parse error at line " + std::to_string(lineno) + " of " + config.store_path);
        }
        MemoryEntry e = MemoryEntry::from_json(j);
        if (e.embedding.size() != config.dimension) {
            fail(Errc::persistence_failure, "entry dimension mismatch at line " + std::to_string(lineno));
        }
        store->adopt(std::move(e));
    }
    return store;
}

RetrievalResult MemoryStore::retrieve(const std::string& query, std::size_t k,
                                      double theta_read) const {
    const auto qv = embedder_->embed(query);
    std::shared_lock lock(mu_);
    std::vector<std::pair<std::size_t, double>> scored;
    scored.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const double sim = cosine(qv, entries_[i].embedding);
        if (sim >= theta_read) scored.emplace_back(i, sim);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (scored.size() > k) scored.resize(k);
    RetrievalResult out;
    out.entries.reserve(scored.size());
    for (const auto& [i, sim] : scored) out.entries.emplace_back(entries_[i], sim);
    return out;
}

RetrievalResult MemoryStore::retrieve(const std::string& query) const {
    return retrieve(query, config_.k, config_.theta_read);
}

bool MemoryStore::store(MemoryEntry entry) {
    if (entry.skill_text.empty()) fail(Errc::invalid_argument, "entry skill_text is empty");
    if (entry.embedding.size() != config_.dimension) {
        fail(Errc::invalid_argument, "entry embedding dimension mismatch");
    }
    const RetrievalResult near = retrieve(entry.skill_text, config_.k, config_.theta_read);
    if (!should_store(near, config_.theta_dup, config_.dup_count)) return false;
    {
        std::unique_lock lock(mu_);
        entries_.push_back(entry);
    }
    persist(entry);
    return true;
}

void MemoryStore::adopt(MemoryEntry entry) {
    std::unique_lock lock(mu_);
    entries_.push_back(std::move(entry));
}

void MemoryStore::persist(const MemoryEntry& entry) {
    if (config_.store_path.empty()) return;
    std::ofstream out(config_.store_path, std::ios::binary | std::ios::app);
    if (!out) fail(Errc::persistence_failure, "cannot append to store: " + config_.store_path);
    out << entry.to_json().dump() << '\n';
    if (!out.good()) fail(Errc::persistence_failure, "short write to store: " + config_.store_path);
}

std::size_t MemoryStore::size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
}

std::vector<MemoryEntry> MemoryStore::entries() const {
    std::shared_lock lock(mu_);
    return entries_;
}

std::optional<MemoryEntry> MemoryStore::find(const std::string& entry_id) const {
    std::shared_lock lock(mu_);
    for (const auto& e : entries_) {
        if (e.entry_id == entry_id) return e;
    }
    return std::nullopt;
}

std::unique_ptr<MemoryStore> MemoryStore::snapshot() const {
    MemoryConfig cfg = config_;
    cfg.store_path.clear();
    auto copy = std::make_unique<MemoryStore>(embedder_, cfg);
    std::shared_lock lock(mu_);
    for (const auto& e : entries_) copy->adopt(e);
    return copy;
}

ExtractionResult extract_skills(const ExtractRequest& request, ModelBackend& model,
                                const Embedder& embedder, std::int64_t now_ms) {
    ExtractionResult result;
    std::vector<SkillDraft> drafts;
    try {
        drafts = model.extract(request);
    } catch (const KernelError& err) {
        if (err.code() == Errc::backend_unavailable) {
            result.backend_failed = true;
            return result;
        }
        throw;
    }
    std::size_t index = 0;
    for (const auto& d : drafts) {
        const auto kind = skill_kind_from_name(d.kind);
        if (!kind || d.skill_text.empty()) {
            ++result.schema_rejected;
            continue;
        }
        MemoryEntry e;
        e.entry_id = request.trace_id + "-k" + std::to_string(index++);
        e.kind = *kind;
        e.skill_text = d.skill_text;
        e.source_trace = request.trace_id;
        e.task_digest = d.task_digest.empty() ? request.task_prompt.substr(0, 120) : d.task_digest;
        e.confidence = std::clamp(d.confidence, 0.0, 1.0);
        e.embedding = embedder.embed(d.skill_text);
        e.created_at_ms = now_ms;
        result.entries.push_back(std::move(e));
    }
    return result;
}

}  // namespace agentk::memory
