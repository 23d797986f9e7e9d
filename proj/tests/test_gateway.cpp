#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "leanopt/gateway.hpp"

using namespace leanopt;

namespace {

ChatRequest simple_request(const std::string& text) {
    ChatRequest r;
    r.messages.push_back({Role::User, text});
    return r;
}

}  // namespace

TEST_CASE("scripted backend pops responses in order and records requests") {
    ScriptedBackend backend({"first", "second"});
    CHECK(backend.complete(simple_request("a")) == "first");
    CHECK(backend.complete(simple_request("b")) == "second");
    REQUIRE(backend.requests().size() == 2);
    CHECK(backend.requests()[0].messages[0].content == "a");
    CHECK(backend.requests()[1].messages[0].content == "b");
    CHECK(backend.requests()[0].temperature == 0.0);
    CHECK(backend.requests()[0].top_p == 1.0);
    CHECK_THROWS_AS(backend.complete(simple_request("c")), GatewayError);
}

TEST_CASE("empty message content is rejected") {
    ScriptedBackend backend({"x"});
    ChatRequest r;
    r.messages.push_back({Role::User, ""});
    CHECK_THROWS_AS(backend.complete(r), GatewayError);
    CHECK_THROWS_AS(backend.complete(ChatRequest{}), GatewayError);
}

TEST_CASE("react loop: direct final answer ends in one step") {
    ScriptedBackend backend({"Thought: easy.\nFinal Answer: Network Revenue Management."});
    auto result = react_loop(backend, "classify the problem", {}, "what type is this?");
    CHECK(result.answer == "Network Revenue Management.");
    REQUIRE(result.trace.events.size() == 3);
    CHECK(result.trace.events[0].kind == EventKind::Prompt);
    CHECK(result.trace.events[1].kind == EventKind::Thought);
    CHECK(result.trace.events[2].kind == EventKind::FinalAnswer);
    CHECK(backend.remaining() == 0);
}

TEST_CASE("react loop: tool call injects observation verbatim") {
    ScriptedBackend backend({
        "Thought: I need the data.\nAction: FileQA\nAction Input: problem type of the content",
        "Thought: got it.\nFinal Answer: Network Revenue Management.",
    });
    std::string seen_input;
    std::vector<Tool> tools = {{"FileQA", "reference lookup", [&](const std::string& in) {
                                    seen_input = in;
                                    return std::string(
                                        "The problem type of the content is Network Revenue "
                                        "Management.");
                                }}};
    auto result = react_loop(backend, "sys", tools, "What is the problem type?");
    CHECK(result.answer == "Network Revenue Management.");
    CHECK(seen_input == "problem type of the content");
    // observation relayed to the model verbatim
    const auto& msgs = backend.requests()[1].messages;
    CHECK(msgs.back().content ==
          "Observation: The problem type of the content is Network Revenue Management.");
    // trace order: prompt, thought, action, observation, thought, final
    std::vector<EventKind> kinds;
    for (const auto& e : result.trace.events) kinds.push_back(e.kind);
    CHECK(kinds == std::vector<EventKind>{EventKind::Prompt, EventKind::Thought, EventKind::Action,
                                          EventKind::Observation, EventKind::Thought,
                                          EventKind::FinalAnswer});
}

TEST_CASE("react loop: unknown tool fails but preserves the trace") {
    ScriptedBackend backend({"Action: Unknown\nAction Input: whatever"});
    try {
        react_loop(backend, "", {}, "q");
        FAIL("expected an error");
    } catch (const ReactError& e) {
        CHECK(std::string(e.what()).find("Unknown") != std::string::npos);
        REQUIRE(e.trace.events.size() == 2);
        CHECK(e.trace.events[1].kind == EventKind::Action);
        CHECK(e.trace.events[1].tool == "Unknown");
    }
}

TEST_CASE("react loop: missing action input is an error") {
    ScriptedBackend backend({"Action: FileQA"});
    std::vector<Tool> tools = {{"FileQA", "", [](const std::string&) { return "x"; }}};
    CHECK_THROWS_WITH_AS(react_loop(backend, "", tools, "q"),
                         "Action 'FileQA' is missing an Action Input", ReactError);
}

TEST_CASE("react loop: one re-prompt on unparseable turn, then failure") {
    ScriptedBackend good({"I will just ramble here.",
                          "Final Answer: recovered"});
    auto result = react_loop(good, "", {}, "q");
    CHECK(result.answer == "recovered");
    REQUIRE(good.requests().size() == 2);
    CHECK(good.requests()[1].messages.back().content.find("did not follow the protocol") !=
          std::string::npos);

    ScriptedBackend bad({"ramble one", "ramble two"});
    CHECK_THROWS_AS(react_loop(bad, "", {}, "q"), ReactError);
}

TEST_CASE("react loop: step limit exceeded") {
    std::vector<std::string> loops;
    for (int i = 0; i < 8; ++i) loops.push_back("Action: Echo\nAction Input: again");
    ScriptedBackend backend(loops);
    std::vector<Tool> tools = {{"Echo", "", [](const std::string& s) { return s; }}};
    CHECK_THROWS_WITH_AS(react_loop(backend, "", tools, "q", 3),
                         "step limit exceeded without a Final Answer", ReactError);
    CHECK(backend.requests().size() == 3);
}

TEST_CASE("react loop: duplicate tool names and bad max_steps rejected") {
    ScriptedBackend backend({"Final Answer: x"});
    std::vector<Tool> dup = {{"T", "", [](const std::string&) { return ""; }},
                             {"T", "", [](const std::string&) { return ""; }}};
    CHECK_THROWS_AS(react_loop(backend, "", dup, "q"), GatewayError);
    CHECK_THROWS_AS(react_loop(backend, "", {}, "q", 0), GatewayError);
}

TEST_CASE("multi-line final answers keep everything after the label") {
    ScriptedBackend backend({"Final Answer: line one\nline two\nThought: not a new section"});
    auto result = react_loop(backend, "", {}, "q");
    CHECK(result.answer == "line one\nline two\nThought: not a new section");
}

TEST_CASE("replaying the same scripted queue yields an identical trace") {
    auto run = [] {
        ScriptedBackend backend({
            "Thought: t1\nAction: Echo\nAction Input: ping",
            "Final Answer: done",
        });
        std::vector<Tool> tools = {{"Echo", "", [](const std::string& s) { return s; }}};
        return react_loop(backend, "sys", tools, "q");
    };
    auto a = run(), b = run();
    CHECK(a.trace == b.trace);
    CHECK(a.trace.to_text() == b.trace.to_text());
    CHECK(a.trace.to_text().find("Action: Echo\nAction Input: ping") != std::string::npos);
}

TEST_CASE("remote backend refuses to start without endpoint or key") {
    CHECK_THROWS_AS(RemoteBackend(RemoteConfig{}), GatewayError);
#ifdef _WIN32
#else
    unsetenv("LEAN_OPT_API_KEY");
#endif
    RemoteBackend backend({"http://localhost:1/v1/chat/completions", "m", 1});
    CHECK_THROWS_WITH_AS(backend.complete(simple_request("hi")), "LEAN_OPT_API_KEY is not set",
                         GatewayError);
}
