#pragma once

#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace leanopt {

struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Role { System, User, Assistant };

struct ChatMessage {
    Role role;
    std::string content;  // must be non-empty
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    double top_p = 1.0;
    std::string model;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

// Deterministic test backend: pops canned responses in order and records
// every request it served.
class ScriptedBackend : public ChatBackend {
public:
    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<std::string> responses);
    void push(const std::string& response);
    std::string complete(const ChatRequest& request) override;
    const std::vector<ChatRequest>& requests() const { return requests_; }
    size_t remaining() const { return queue_.size(); }

private:
    std::deque<std::string> queue_;
    std::vector<ChatRequest> requests_;
};

// Chat-completions HTTP backend. Bearer token comes from the environment
// (LEAN_OPT_API_KEY); it is never stored in config files.
struct RemoteConfig {
    std::string endpoint;  // e.g. https://host/v1/chat/completions
    std::string model;
    int timeout_seconds = 60;
};

class RemoteBackend : public ChatBackend {
public:
    explicit RemoteBackend(RemoteConfig config);
    std::string complete(const ChatRequest& request) override;

private:
    RemoteConfig config_;
};

enum class EventKind { Prompt, Thought, Action, Observation, FinalAnswer };

struct TraceEvent {
    EventKind kind;
    std::string text;   // event payload; for Action this is the tool input
    std::string tool;   // Action only
    bool operator==(const TraceEvent&) const = default;
};

struct AgentTrace {
    std::vector<TraceEvent> events;
    std::string to_text() const;
    bool operator==(const AgentTrace&) const = default;
};

struct ReactError : GatewayError {
    ReactError(const std::string& msg, AgentTrace t) : GatewayError(msg), trace(std::move(t)) {}
    AgentTrace trace;
};

struct Tool {
    std::string name;
    std::string description;
    std::function<std::string(const std::string&)> run;
};

struct ReactResult {
    std::string answer;
    AgentTrace trace;
};

// Iterated Thought / Action / Action Input / Observation protocol ending in
// "Final Answer:". One re-prompt with a format reminder is issued on an
// unparseable turn before failing.
ReactResult react_loop(ChatBackend& backend, const std::string& system_prompt,
                       const std::vector<Tool>& tools, const std::string& question,
                       int max_steps = 6);

}  // namespace leanopt
