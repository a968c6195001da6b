#include "agentk/trace.hpp"

#include <fstream>
#include <sstream>

namespace agentk {

json TraceEvent::to_json() const {
    return json{{"seq", seq}, {"wall_offset_ms", wall_offset_ms}, {"kind", kind}, {"payload", payload}};
}

TraceEvent TraceEvent::from_json(const json& j) {
    TraceEvent e;
    try {
        e.seq = j.at("seq").get<std::uint64_t>();
        e.wall_offset_ms = j.at("wall_offset_ms").get<std::int64_t>();
        e.kind = j.at("kind").get<std::string>();
        e.payload = j.at("payload");
    } catch (const json::exception& ex) {
        fail(Errc::bad_trace, std::string("malformed trace event: ") + ex.what());
    }
    return e;
}

Trace::Trace(Trace&& other) noexcept {
    trace_id_ = std::move(other.trace_id_);
    seed_ = other.seed_;
    events_ = std::move(other.events_);
}

Trace& Trace::operator=(Trace&& other) noexcept {
    if (this != &other) {
        trace_id_ = std::move(other.trace_id_);
        seed_ = other.seed_;
        events_ = std::move(other.events_);
    }
    return *this;
}

std::uint64_t Trace::append(const std::string& kind, json payload, std::int64_t wall_offset_ms) {
    std::lock_guard<std::mutex> lock(mu_);
    TraceEvent e;
    e.seq = events_.size();
    e.wall_offset_ms = wall_offset_ms;
    e.kind = kind;
    e.payload = std::move(payload);
    events_.push_back(std::move(e));
    return events_.back().seq;
}

void Trace::append_fragment(const TraceFragment& fragment) {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& pe : fragment) {
        TraceEvent e;
        e.seq = events_.size();
        e.wall_offset_ms = pe.wall_offset_ms;
        e.kind = pe.kind;
        e.payload = pe.payload;
        events_.push_back(std::move(e));
    }
}

std::string Trace::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : events_) {
        out << e.to_json().dump() << '\n';
    }
    return out.str();
}

void Trace::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot open trace file for writing: " + path);
    out << to_jsonl();
    if (!out.good()) fail(Errc::io_error, "short write to trace file: " + path);
}

std::vector<TraceEvent> Trace::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open trace file: " + path);
    std::vector<TraceEvent> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            fail(Errc::bad_trace, "trace parse error at line " + std::to_string(lineno));
        }
        events.push_back(TraceEvent::from_json(j));
    }
    return events;
}

}  // namespace agentk
