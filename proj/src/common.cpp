#include "agentk/common.hpp"

namespace agentk {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::backend_unavailable: return "backend_unavailable";
        case Errc::scenario_mismatch: return "scenario_mismatch";
        case Errc::empty_ensemble: return "empty_ensemble";
        case Errc::ensemble_too_large: return "ensemble_too_large";
        case Errc::duplicate_subagent_id: return "duplicate_subagent_id";
        case Errc::batch_too_large: return "batch_too_large";
        case Errc::empty_batch: return "empty_batch";
        case Errc::malformed_indices: return "malformed_indices";
        case Errc::unknown_tool: return "unknown_tool";
        case Errc::summarizer_unavailable: return "summarizer_unavailable";
        case Errc::budget_too_small: return "budget_too_small";
        case Errc::empty_after_sanitize: return "empty_after_sanitize";
        case Errc::invalid_box: return "invalid_box";
        case Errc::degenerate_box: return "degenerate_box";
        case Errc::tile_mismatch: return "tile_mismatch";
        case Errc::pole_proximity: return "pole_proximity";
        case Errc::box_out_of_bounds: return "box_out_of_bounds";
        case Errc::embedder_unavailable: return "embedder_unavailable";
        case Errc::persistence_failure: return "persistence_failure";
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::bad_scenario: return "bad_scenario";
        case Errc::bad_config: return "bad_config";
        case Errc::bad_trace: return "bad_trace";
        case Errc::replay_divergence: return "replay_divergence";
        case Errc::io_error: return "io_error";
    }
    return "unknown";
}

KernelError::KernelError(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw KernelError(code, message); }

std::string filler_text(std::size_t n) {
    std::string s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back(static_cast<char>('a' + (i * 7 + i / 26) % 26));
    }
    return s;
}

}  // namespace agentk
