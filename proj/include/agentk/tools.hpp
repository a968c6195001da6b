#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "agentk/common.hpp"

namespace agentk {

struct ToolResult {
    bool ok = true;
    std::string content;
    std::string error_kind;
    std::string error_message;
    std::int64_t delay_ms = 0;  // simulated execution time
};

struct CallContext {
    std::string subagent;
    int round = 0;
    int call_index = 0;
};

/// prepare() is called sequentially in call-index order before the batch
/// fans out, so stateful fakes (scripted reply queues) hand out their next
/// behavior deterministically; the returned thunk may run on any thread.
class Tool {
public:
    virtual ~Tool() = default;
    virtual std::function<ToolResult()> prepare(const json& args, const CallContext& ctx) = 0;
};

class ToolRegistry {
public:
    void add(const std::string& name, std::shared_ptr<Tool> tool);
    std::shared_ptr<Tool> resolve(const std::string& name) const;
    bool has(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::shared_ptr<Tool>> tools_;
};

}  // namespace agentk
