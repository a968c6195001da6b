#include "agentk/config.hpp"

#include <fstream>

namespace agentk {

void KernelConfig::validate() const {
    ledger.validate();
    memory.validate();
    if (scheduler.ensemble_cap == 0) fail(Errc::bad_config, "scheduler.ensemble_cap must be >= 1");
    if (scheduler.batch_cap == 0) fail(Errc::bad_config, "scheduler.batch_cap must be >= 1");
    if (scheduler.tool_timeout_ms <= 0) fail(Errc::bad_config, "scheduler.tool_timeout_ms must be > 0");
    if (gateway.base_delay_ms <= 0) fail(Errc::bad_config, "gateway.base_delay_ms must be > 0");
    if (gateway.factor <= 1.0) fail(Errc::bad_config, "gateway.factor must be > 1");
    if (gateway.max_retries < 1) fail(Errc::bad_config, "gateway.max_retries must be >= 1");
    if (runtime.rounds_main < 1) fail(Errc::bad_config, "runtime.rounds_main must be >= 1");
    if (runtime.rounds_worker < 1) fail(Errc::bad_config, "runtime.rounds_worker must be >= 1");
    if (harness.attempts < 1) fail(Errc::bad_config, "harness.attempts must be >= 1");
    if (harness.processes < 1) fail(Errc::bad_config, "harness.processes must be >= 1");
}

json KernelConfig::to_json() const {
    return json{
        {"ledger",
         {{"tau_max", ledger.tau_max},
          {"tau_multi", ledger.tau_multi},
          {"tau_context", ledger.tau_context},
          {"summary_cap", ledger.summary_cap}}},
        {"memory",
         {{"k", memory.k},
          {"theta_read", memory.theta_read},
          {"theta_dup", memory.theta_dup},
          {"dup_count", memory.dup_count},
          {"dimension", memory.dimension},
          {"store_path", memory.store_path}}},
        {"scheduler",
         {{"ensemble_cap", scheduler.ensemble_cap},
          {"batch_cap", scheduler.batch_cap},
          {"tool_timeout_ms", scheduler.tool_timeout_ms}}},
        {"gateway",
         {{"base_delay_ms", gateway.base_delay_ms},
          {"factor", gateway.factor},
          {"max_retries", gateway.max_retries},
          {"jitter", gateway.jitter}}},
        {"runtime",
         {{"rounds_main", runtime.rounds_main},
          {"rounds_worker", runtime.rounds_worker},
          {"reasoning", runtime.reasoning},
          {"seed", runtime.seed},
          {"temperature", runtime.temperature},
          {"max_output_tokens", runtime.max_output_tokens}}},
        {"harness", {{"attempts", harness.attempts}, {"processes", harness.processes}}},
    };
}

namespace {

template <typename T>
void read_field(const json& j, const char* section, const char* key, T& out) {
    if (!j.contains(section)) return;
    const json& s = j.at(section);
    if (!s.is_object() || !s.contains(key)) return;
    try {
        out = s.at(key).get<T>();
    } catch (const json::exception&) {
        fail(Errc::bad_config, std::string("config field ") + section + "." + key + " has wrong type");
    }
}

}  // namespace

KernelConfig KernelConfig::from_json(const json& j) {
    KernelConfig c;
    if (!j.is_object()) fail(Errc::bad_config, "config root must be an object");
    read_field(j, "ledger", "tau_max", c.ledger.tau_max);
    read_field(j, "ledger", "tau_multi", c.ledger.tau_multi);
    read_field(j, "ledger", "tau_context", c.ledger.tau_context);
    read_field(j, "ledger", "summary_cap", c.ledger.summary_cap);
    read_field(j, "memory", "k", c.memory.k);
    read_field(j, "memory", "theta_read", c.memory.theta_read);
    read_field(j, "memory", "theta_dup", c.memory.theta_dup);
    read_field(j, "memory", "dup_count", c.memory.dup_count);
    read_field(j, "memory", "dimension", c.memory.dimension);
    read_field(j, "memory", "store_path", c.memory.store_path);
    read_field(j, "scheduler", "ensemble_cap", c.scheduler.ensemble_cap);
    read_field(j, "scheduler", "batch_cap", c.scheduler.batch_cap);
    read_field(j, "scheduler", "tool_timeout_ms", c.scheduler.tool_timeout_ms);
    read_field(j, "gateway", "base_delay_ms", c.gateway.base_delay_ms);
    read_field(j, "gateway", "factor", c.gateway.factor);
    read_field(j, "gateway", "max_retries", c.gateway.max_retries);
    read_field(j, "gateway", "jitter", c.gateway.jitter);
    read_field(j, "runtime", "rounds_main", c.runtime.rounds_main);
    read_field(j, "runtime", "rounds_worker", c.runtime.rounds_worker);
    read_field(j, "runtime", "reasoning", c.runtime.reasoning);
    read_field(j, "runtime", "seed", c.runtime.seed);
    read_field(j, "runtime", "temperature", c.runtime.temperature);
    read_field(j, "runtime", "max_output_tokens", c.runtime.max_output_tokens);
    read_field(j, "harness", "attempts", c.harness.attempts);
    read_field(j, "harness", "processes", c.harness.processes);
    c.validate();
    return c;
}

KernelConfig KernelConfig::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::bad_config, "cannot open config file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(Errc::bad_config, "config parse error in " + path);
    return from_json(j);
}

void KernelConfig::merge(const json& overrides) {
    if (overrides.is_null()) return;
    if (!overrides.is_object()) fail(Errc::bad_config, "config overrides must be an object");
    json merged = to_json();
    merged.merge_patch(overrides);
    *this = from_json(merged);
}

void KernelConfig::apply_dotted(const std::string& dotted_key, const std::string& value) {
    json merged = to_json();
    std::string pointer = "/";
    for (char ch : dotted_key) pointer.push_back(ch == '.' ? '/' : ch);
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;
    try {
        merged[json::json_pointer(pointer)] = parsed;
    } catch (const json::exception&) {
        fail(Errc::bad_config, "bad override key: " + dotted_key);
    }
    *this = from_json(merged);
}

}  // namespace agentk
