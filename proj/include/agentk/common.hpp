#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace agentk {

using json = nlohmann::json;

enum class Errc {
    backend_unavailable,
    scenario_mismatch,
    empty_ensemble,
    ensemble_too_large,
    duplicate_subagent_id,
    batch_too_large,
    empty_batch,
    malformed_indices,
    unknown_tool,
    summarizer_unavailable,
    budget_too_small,
    empty_after_sanitize,
    invalid_box,
    degenerate_box,
    tile_mismatch,
    pole_proximity,
    box_out_of_bounds,
    embedder_unavailable,
    persistence_failure,
    invalid_argument,
    bad_scenario,
    bad_config,
    bad_trace,
    replay_divergence,
    io_error,
};

const char* errc_name(Errc c);

/// Domain error carrying a stable code so callers can branch without
/// string matching.
class KernelError : public std::runtime_error {
public:
    KernelError(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

// Deterministic lowercase filler, used by fake tools and sized summaries.
std::string filler_text(std::size_t n);

}  // namespace agentk
