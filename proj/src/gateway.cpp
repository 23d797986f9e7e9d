#include "leanopt/gateway.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace leanopt {

namespace {

void check_request(const ChatRequest& request) {
    if (request.messages.empty()) throw GatewayError("request has no messages");
    for (const auto& m : request.messages)
        if (m.content.empty()) throw GatewayError("empty message content");
}

std::string role_name(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses)
    : queue_(responses.begin(), responses.end()) {}

void ScriptedBackend::push(const std::string& response) { queue_.push_back(response); }

std::string ScriptedBackend::complete(const ChatRequest& request) {
    check_request(request);
    requests_.push_back(request);
    if (queue_.empty()) throw GatewayError("scripted response queue exhausted");
    std::string out = std::move(queue_.front());
    queue_.pop_front();
    return out;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw GatewayError("remote backend requires an endpoint");
}

std::string RemoteBackend::complete(const ChatRequest& request) {
    check_request(request);
    const char* key = std::getenv("LEAN_OPT_API_KEY");
    if (!key || !*key) throw GatewayError("LEAN_OPT_API_KEY is not set");

    nlohmann::json body;
    body["model"] = request.model.empty() ? config_.model : request.model;
    body["temperature"] = request.temperature;
    body["top_p"] = request.top_p;
    auto& messages = body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
        messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});

    auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw GatewayError("malformed endpoint URL");
    auto path_start = config_.endpoint.find('/', scheme_end + 3);
    std::string host = config_.endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);

    httplib::Client client(host);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw GatewayError("transport error reaching " + host);
    if (res->status != 200)
        throw GatewayError("backend returned HTTP " + std::to_string(res->status));
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty())
        throw GatewayError("malformed completion response");
    return parsed["choices"][0]["message"]["content"].get<std::string>();
}

std::string AgentTrace::to_text() const {
    std::string out;
    for (const auto& e : events) {
        switch (e.kind) {
            case EventKind::Prompt: out += "Prompt: " + e.text + "\n"; break;
            case EventKind::Thought: out += "Thought: " + e.text + "\n"; break;
            case EventKind::Action:
                out += "Action: " + e.tool + "\nAction Input: " + e.text + "\n";
                break;
            case EventKind::Observation: out += "Observation: " + e.text + "\n"; break;
            case EventKind::FinalAnswer: out += "Final Answer: " + e.text + "\n"; break;
        }
    }
    return out;
}

namespace {

struct Turn {
    std::vector<std::string> thoughts;
    bool has_action = false;
    std::string action, action_input;
    bool has_final = false;
    std::string final_answer;
    bool action_input_present = false;
};

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Line-anchored section labels; each section body runs to the next label.
// Everything after "Final Answer:" belongs to the answer.
Turn parse_turn(const std::string& text) {
    static const std::vector<std::string> labels = {"Thought:", "Action:", "Action Input:",
                                                    "Final Answer:"};
    Turn turn;
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    std::string current;  // active label
    std::string body;
    auto flush = [&] {
        if (current.empty()) return;
        std::string value = strip(body);
        if (current == "Thought:") turn.thoughts.push_back(value);
        else if (current == "Action:") {
            turn.has_action = true;
            turn.action = value;
        } else if (current == "Action Input:") {
            turn.action_input_present = true;
            turn.action_input = value;
        } else {
            turn.has_final = true;
            turn.final_answer = value;
        }
        body.clear();
    };
    for (const auto& raw : lines) {
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = strip(line);
        const std::string* matched = nullptr;
        for (const auto& label : labels)
            if (stripped.rfind(label, 0) == 0) {
                matched = &label;
                break;
            }
        if (matched && !(current == "Final Answer:")) {
            flush();
            current = *matched;
            body = stripped.substr(matched->size());
        } else if (!current.empty()) {
            body += "\n" + line;
        }
    }
    flush();
    return turn;
}

}  // namespace

ReactResult react_loop(ChatBackend& backend, const std::string& system_prompt,
                       const std::vector<Tool>& tools, const std::string& question,
                       int max_steps) {
    if (max_steps < 1) throw GatewayError("max_steps must be at least 1");
    for (size_t i = 0; i < tools.size(); ++i)
        for (size_t j = i + 1; j < tools.size(); ++j)
            if (tools[i].name == tools[j].name)
                throw GatewayError("duplicate tool name '" + tools[i].name + "'");

    AgentTrace trace;
    trace.events.push_back({EventKind::Prompt, question, ""});
    ChatRequest request;
    if (!system_prompt.empty()) request.messages.push_back({Role::System, system_prompt});
    request.messages.push_back({Role::User, question});

    bool reprompted = false;
    for (int step = 0; step < max_steps; ++step) {
        std::string reply = backend.complete(request);
        Turn turn = parse_turn(reply);
        for (const auto& t : turn.thoughts)
            if (!t.empty()) trace.events.push_back({EventKind::Thought, t, ""});
        if (turn.has_final) {
            trace.events.push_back({EventKind::FinalAnswer, turn.final_answer, ""});
            return {turn.final_answer, trace};
        }
        request.messages.push_back({Role::Assistant, reply});
        if (!turn.has_action) {
            if (reprompted)
                throw ReactError("unparseable turn: no Action or Final Answer", trace);
            reprompted = true;
            request.messages.push_back(
                {Role::User,
                 "Your last reply did not follow the protocol. Respond with either an "
                 "\"Action:\" line plus an \"Action Input:\" line, or a \"Final Answer:\" line."});
            --step;  // the reminder does not consume a reasoning step
            continue;
        }
        if (!turn.action_input_present)
            throw ReactError("Action '" + turn.action + "' is missing an Action Input", trace);
        const Tool* tool = nullptr;
        for (const auto& t : tools)
            if (t.name == turn.action) tool = &t;
        if (!tool) {
            trace.events.push_back({EventKind::Action, turn.action_input, turn.action});
            throw ReactError("unknown tool '" + turn.action + "'", trace);
        }
        trace.events.push_back({EventKind::Action, turn.action_input, turn.action});
        std::string observation = tool->run(turn.action_input);
        trace.events.push_back({EventKind::Observation, observation, ""});
        request.messages.push_back({Role::User, "Observation: " + observation});
    }
    throw ReactError("step limit exceeded without a Final Answer", trace);
}

}  // namespace leanopt
