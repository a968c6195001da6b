#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "agentk/common.hpp"

namespace testsupport {

using agentk::json;

inline std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("agentk_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path.string();
}

inline std::string random_word(std::mt19937_64& rng) {
    static const std::vector<std::string> pool = {
        "alpha", "basalt", "cobalt", "delta",  "ember",  "fjord", "granite", "harbor",
        "indigo", "juniper", "krill", "lumen", "meadow", "nickel", "orchid", "pylon",
        "quartz", "ribbon", "saffron", "tundra", "umber", "vellum", "willow", "zephyr"};
    return pool[rng() % pool.size()];
}

inline std::string random_sentence(std::mt19937_64& rng, int words) {
    std::string s;
    for (int i = 0; i < words; ++i) {
        if (!s.empty()) s.push_back(' ');
        s += random_word(rng);
    }
    return s;
}

/// Generates a self-consistent scripted scenario: every reply the runtime
/// will ask for exists, workers terminate, and all content is drawn
/// deterministically from the generator seed.
inline json random_scenario(std::mt19937_64& rng, const std::string& task_id) {
    json scenario;
    scenario["task"] = {{"id", task_id}, {"prompt", "task: " + random_sentence(rng, 6)}};
    scenario["summarizer"] = {{"mode", "sized"}, {"size", 150 + static_cast<int>(rng() % 250)}};

    json tools = {
        {"t_echo", {{"behavior", "echo"}, {"delay_ms", 5 + static_cast<int>(rng() % 40)}}},
        {"t_small", {{"behavior", "filler"}, {"size", 200}, {"delay_ms", 10}}},
        {"t_big", {{"behavior", "filler"}, {"size", 6000 + static_cast<int>(rng() % 4000)}, {"delay_ms", 25}}},
        {"t_err",
         {{"behavior", "script"},
          {"script", json::array({json{{"error", "timeout"}, {"message", "scripted timeout"}}})}}},
        {"t_slow", {{"behavior", "fixed"}, {"result", "late"}, {"delay_ms", 45000}}},
    };
    scenario["tools"] = tools;
    const std::vector<std::string> tool_names = {"t_echo", "t_small", "t_big", "t_err", "t_slow"};

    json replies = json::array();
    const bool reasoning = rng() % 10 < 3;
    if (reasoning) {
        scenario["config"] = {{"runtime", {{"reasoning", true}}}};
        replies.push_back({{"role", "reason"}, {"note", "intent: " + random_sentence(rng, 4)}});
    }

    const int main_rounds = 1 + static_cast<int>(rng() % 2);
    int worker_counter = 0;
    for (int r = 1; r <= main_rounds; ++r) {
        json route = json::array();
        const int workers = 1 + static_cast<int>(rng() % 3);
        for (int w = 0; w < workers; ++w) {
            const std::string id = "w" + std::to_string(++worker_counter);
            route.push_back({{"subagent", id},
                             {"prompt", "subtask " + random_sentence(rng, 3)},
                             {"tools", json::array()}});

            const int act_rounds = 1 + static_cast<int>(rng() % 3);
            for (int a = 1; a < act_rounds; ++a) {
                json calls = json::array();
                const int n_calls = 1 + static_cast<int>(rng() % 5);
                for (int c = 0; c < n_calls; ++c) {
                    const std::string& tool = tool_names[rng() % tool_names.size()];
                    json args = tool == "t_echo"
                                    ? json{{"text", random_sentence(rng, 2)}}
                                    : json{{"query", random_word(rng)}};
                    calls.push_back({{"tool", tool}, {"args", args}});
                }
                replies.push_back(
                    {{"role", "act"}, {"subagent", id}, {"round", a}, {"calls", calls}});
            }
            const std::string answer = random_word(rng);
            replies.push_back({{"role", "act"},
                               {"subagent", id},
                               {"round", act_rounds},
                               {"terminal", answer}});
            const int verdict = static_cast<int>(rng() % 10);
            if (verdict < 6) {
                replies.push_back(
                    {{"role", "verify"}, {"subagent", id}, {"round", act_rounds}, {"outcome", "accepted"}});
            } else if (verdict < 8) {
                replies.push_back(
                    {{"role", "verify"}, {"subagent", id}, {"round", act_rounds}, {"outcome", "rejected"},
                     {"note", "insufficient evidence"}});
            } else {
                replies.push_back({{"role", "verify"},
                                   {"subagent", id},
                                   {"round", act_rounds},
                                   {"outcome", "retry"},
                                   {"note", "check " + random_word(rng)}});
                replies.push_back({{"role", "act"},
                                   {"subagent", id},
                                   {"round", act_rounds + 1},
                                   {"terminal", answer + " (recheck)"}});
                replies.push_back({{"role", "verify"},
                                   {"subagent", id},
                                   {"round", act_rounds + 1},
                                   {"outcome", "accepted"}});
            }
            replies.push_back({{"role", "summarize"},
                               {"subagent", id},
                               {"text", "worker " + id + ": " + random_sentence(rng, 8)}});
            if (rng() % 10 < 2) {
                scenario["faults"]["backend"].push_back(
                    {{"role", "summarize"}, {"subagent", id}});
            }
        }
        replies.push_back({{"role", "plan"}, {"round", r}, {"rationale", "round"}, {"route", route}});
    }
    replies.push_back({{"role", "plan"}, {"round", main_rounds + 1}, {"resolve", true}});
    replies.push_back({{"role", "aggregate"},
                       {"answer", random_word(rng)},
                       {"confidence", static_cast<double>(rng() % 100) / 100.0}});
    if (rng() % 2 == 0) {
        json entries = json::array();
        const int n = 1 + static_cast<int>(rng() % 2);
        static const std::vector<std::string> kinds = {
            "code_snippet", "tool_usage", "technical_insight", "decision_rule", "workflow_pattern"};
        for (int i = 0; i < n; ++i) {
            entries.push_back({{"kind", kinds[rng() % kinds.size()]},
                               {"skill_text", random_sentence(rng, 7)},
                               {"confidence", 0.5}});
        }
        replies.push_back({{"role", "extract"}, {"entries", entries}});
    }
    scenario["replies"] = replies;
    return scenario;
}

}  // namespace testsupport
