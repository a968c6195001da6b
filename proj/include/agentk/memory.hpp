#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "agentk/common.hpp"
#include "agentk/model.hpp"

namespace agentk::memory {

enum class SkillKind { code_snippet, tool_usage, technical_insight, decision_rule, workflow_pattern };

const char* skill_kind_name(SkillKind k);
std::optional<SkillKind> skill_kind_from_name(const std::string& name);

struct MemoryEntry {
    std::string entry_id;
    SkillKind kind = SkillKind::technical_insight;
    std::string skill_text;
    std::string source_trace;
    std::string task_digest;
    double confidence = 0.0;
    std::vector<double> embedding;
    std::int64_t created_at_ms = 0;

    json to_json() const;
    static MemoryEntry from_json(const json& j);
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    /// Deterministic unit-norm embedding; throws on empty text.
    virtual std::vector<double> embed(const std::string& text) const = 0;
};

/// Signed hashed bag-of-words. No external model, fully reproducible, and
/// cheap enough for exhaustive-scan oracles in tests.
class HashedBagEmbedder final : public Embedder {
public:
    explicit HashedBagEmbedder(std::size_t dimension = 256) : dimension_(dimension) {}
    std::size_t dimension() const override { return dimension_; }
    std::vector<double> embed(const std::string& text) const override;

private:
    std::size_t dimension_;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

struct RetrievalResult {
    // Sorted by similarity descending; ties keep insertion order.
    std::vector<std::pair<MemoryEntry, double>> entries;
};

struct MemoryConfig {
    std::size_t k = 5;
    double theta_read = 0.55;
    double theta_dup = 0.9;
    std::size_t dup_count = 2;
    std::size_t dimension = 256;
    std::string store_path;  // empty = in-memory only

    void validate() const;
};

/// The write gate: refuse a new entry iff at least dup_count existing
/// entries already match it at similarity >= theta_dup.
bool should_store(const RetrievalResult& retrieval, double theta_dup, std::size_t dup_count);

class MemoryStore {
public:
    MemoryStore(std::shared_ptr<Embedder> embedder, MemoryConfig config);
    virtual ~MemoryStore() = default;

    static std::unique_ptr<MemoryStore> open(std::shared_ptr<Embedder> embedder, MemoryConfig config);

    virtual RetrievalResult retrieve(const std::string& query, std::size_t k, double theta_read) const;
    RetrievalResult retrieve(const std::string& query) const;

    /// Gate-checked write. Returns whether the entry was persisted.
    virtual bool store(MemoryEntry entry);

    std::size_t size() const;
    std::vector<MemoryEntry> entries() const;
    std::optional<MemoryEntry> find(const std::string& entry_id) const;

    const MemoryConfig& config() const { return config_; }
    const Embedder& embedder() const { return *embedder_; }

    /// Read-only copy with no backing file; used by the report harness.
    std::unique_ptr<MemoryStore> snapshot() const;
    /// Appends without consulting the gate (load/merge paths).
    void adopt(MemoryEntry entry);

protected:
    std::shared_ptr<Embedder> embedder_;
    MemoryConfig config_;

private:
    void persist(const MemoryEntry& entry);

    mutable std::shared_mutex mu_;
    std::vector<MemoryEntry> entries_;
};

struct ExtractionResult {
    std::vector<MemoryEntry> entries;
    bool backend_failed = false;
    std::size_t schema_rejected = 0;
};

/// Runs skill extraction for a finished trace — success or failure alike —
/// and materializes schema-valid entries ready for the write gate.
ExtractionResult extract_skills(const ExtractRequest& request, ModelBackend& model,
                                const Embedder& embedder, std::int64_t now_ms);

}  // namespace agentk::memory
