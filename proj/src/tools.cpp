#include "agentk/tools.hpp"

namespace agentk {

void ToolRegistry::add(const std::string& name, std::shared_ptr<Tool> tool) {
    tools_[name] = std::move(tool);
}

std::shared_ptr<Tool> ToolRegistry::resolve(const std::string& name) const {
    auto it = tools_.find(name);
    if (it == tools_.end()) return nullptr;
    return it->second;
}

bool ToolRegistry::has(const std::string& name) const { return tools_.count(name) != 0; }

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(tools_.size());
    for (const auto& [name, _] : tools_) out.push_back(name);
    return out;
}

}  // namespace agentk
