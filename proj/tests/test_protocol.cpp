#include <doctest.h>

#include "juris/protocol.hpp"

using namespace juris;
using protocol::SegmentKind;

namespace {

void check_partition(const std::string& raw, const std::vector<protocol::TurnSegment>& segments) {
    std::string rebuilt;
    std::size_t cursor = 0;
    for (auto& seg : segments) {
        CHECK(seg.begin == cursor);
        CHECK(seg.end >= seg.begin);
        CHECK(seg.raw == raw.substr(seg.begin, seg.end - seg.begin));
        rebuilt += seg.raw;
        cursor = seg.end;
    }
    CHECK(rebuilt == raw);
}

}  // namespace

TEST_CASE("a single well-formed envelope parses into one tool_call segment") {
    std::string raw =
        R"(<tool_call>{"name":"law_retrieval","arguments":{"query":"case summary","topk":5}}</tool_call>)";
    auto segments = protocol::parse_turn(raw);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].kind == SegmentKind::tool_call);
    REQUIRE(segments[0].call);
    CHECK(segments[0].call->name == "law_retrieval");
    CHECK(segments[0].call->arguments["query"] == "case summary");
    CHECK(segments[0].call->arguments["topk"] == 5);
    check_partition(raw, segments);
}

TEST_CASE("plain prose yields one text segment spanning the whole input") {
    std::string raw = "No tools are needed here; the answer follows directly.";
    auto segments = protocol::parse_turn(raw);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].kind == SegmentKind::text);
    CHECK(segments[0].raw == raw);
    check_partition(raw, segments);
}

TEST_CASE("text + call + text partitions byte-exactly into three segments") {
    std::string raw = "Let me check.\n<tool_call>{\"name\":\"memory_fetch\",\"arguments\":"
                      "{\"memory_type\":\"knowledge\"}}</tool_call>\nDone.";
    auto segments = protocol::parse_turn(raw);
    REQUIRE(segments.size() == 3);
    CHECK(segments[0].kind == SegmentKind::text);
    CHECK(segments[1].kind == SegmentKind::tool_call);
    CHECK(segments[2].kind == SegmentKind::text);
    check_partition(raw, segments);
}

TEST_CASE("envelope markers inside quoted string values are not consumed") {
    std::string raw =
        R"(<tool_call>{"name":"memory_store","arguments":{"memory_type":"context","content":"see </tool_call> and <tool_call> markers"}}</tool_call>)";
    auto segments = protocol::parse_turn(raw);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].kind == SegmentKind::tool_call);
    CHECK(segments[0].call->arguments["content"] ==
          "see </tool_call> and <tool_call> markers");
    check_partition(raw, segments);
}

TEST_CASE("malformed payload becomes a malformed segment, parsing continues") {
    std::string raw = "a<tool_call>{not json]</tool_call>b";
    auto segments = protocol::parse_turn(raw);
    REQUIRE(segments.size() == 3);
    CHECK(segments[0].kind == SegmentKind::text);
    CHECK(segments[1].kind == SegmentKind::malformed);
    CHECK(!segments[1].error.empty());
    CHECK(segments[2].kind == SegmentKind::text);
    check_partition(raw, segments);
}

TEST_CASE("valid JSON that is not a call object is malformed") {
    std::string raw = R"(<tool_call>{"arguments":{}}</tool_call>)";
    auto segments = protocol::parse_turn(raw);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].kind == SegmentKind::malformed);
    check_partition(raw, segments);

    auto arr = protocol::parse_turn(R"(<tool_call>[1,2]</tool_call>)");
    REQUIRE(arr.size() == 1);
    CHECK(arr[0].kind == SegmentKind::malformed);
}

TEST_CASE("an unterminated envelope becomes the incomplete tail") {
    std::string raw = "thinking...\n<tool_call>{\"name\":\"law_retrieval\",\"argu";
    auto segments = protocol::parse_turn(raw);
    REQUIRE(segments.size() == 2);
    CHECK(segments[0].kind == SegmentKind::text);
    CHECK(segments[1].kind == SegmentKind::incomplete);
    CHECK(segments[1].end == raw.size());
    check_partition(raw, segments);
}

TEST_CASE("prefix parses are prefixes of the full parse") {
    std::string raw = "intro <tool_call>{\"name\":\"a\",\"arguments\":{}}</tool_call> middle "
                      "<tool_call>{\"name\":\"b\",\"arguments\":{\"x\":1}}</tool_call> end";
    auto full = protocol::parse_turn(raw);
    for (std::size_t cut = 0; cut <= raw.size(); ++cut) {
        auto partial = protocol::parse_turn(raw.substr(0, cut));
        if (partial.empty()) continue;
        partial.pop_back();  // the tail segment is tentative
        REQUIRE(partial.size() <= full.size());
        for (std::size_t i = 0; i < partial.size(); ++i) {
            CHECK(partial[i].kind == full[i].kind);
            CHECK(partial[i].raw == full[i].raw);
        }
    }
}

TEST_CASE("render_result wraps plain text directly") {
    auto rendered = protocol::render_result(protocol::ToolResult::ok("3 statutes found"));
    CHECK(rendered == "<tool_call_result>3 statutes found</tool_call_result>");
}

TEST_CASE("render_result serializes structured payloads with sorted keys") {
    protocol::json payload{{"zeta", 1}, {"alpha", 2}};
    auto rendered = protocol::render_result(protocol::ToolResult::ok(payload));
    CHECK(rendered ==
          "<tool_call_result>{\"alpha\":2,\"zeta\":1}</tool_call_result>");
    // Reparse the body and compare structurally.
    auto body = rendered.substr(18, rendered.size() - 18 - 19);
    CHECK(protocol::json::parse(body) == payload);
}

TEST_CASE("error results carry code and message fields inside the envelope") {
    auto rendered =
        protocol::render_result(protocol::ToolResult::error("not_found", "no such article"));
    CHECK(rendered.find("\"code\":\"not_found\"") != std::string::npos);
    CHECK(rendered.find("\"message\":\"no such article\"") != std::string::npos);
    CHECK(rendered.rfind("<tool_call_result>", 0) == 0);
}

TEST_CASE("render then parse round-trips calls") {
    protocol::ToolCall call;
    call.name = "law_retrieval";
    call.arguments = protocol::json{{"query", "recusal"}, {"topk", 5}};
    auto segments = protocol::parse_turn("x" + protocol::render_call(call) + "y");
    REQUIRE(segments.size() == 3);
    REQUIRE(segments[1].call);
    CHECK(segments[1].call->name == call.name);
    CHECK(segments[1].call->arguments == call.arguments);
}

TEST_CASE("validate_call reports unknown tool, missing arg, wrong kind") {
    protocol::SchemaMap schemas;
    schemas["law_retrieval"] = {"law_retrieval",
                                {{"query", protocol::ValueKind::string, true, {}},
                                 {"topk", protocol::ValueKind::integer, false, {}}}};

    protocol::ToolCall ok{"law_retrieval", protocol::json{{"query", "q"}, {"topk", 5}}};
    CHECK(protocol::validate_call(ok, schemas).empty());

    protocol::ToolCall missing{"law_retrieval", protocol::json::object()};
    auto v1 = protocol::validate_call(missing, schemas);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0] == "missing: query");

    protocol::ToolCall unknown{"foo", protocol::json::object()};
    auto v2 = protocol::validate_call(unknown, schemas);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].find("unknown tool") != std::string::npos);

    protocol::ToolCall wrong{"law_retrieval",
                             protocol::json{{"query", "q"}, {"topk", "five"}}};
    auto v3 = protocol::validate_call(wrong, schemas);
    REQUIRE(v3.size() == 1);
    CHECK(v3[0].find("wrong kind") != std::string::npos);
}

TEST_CASE("validate_call accepts declared argument aliases") {
    protocol::SchemaMap schemas;
    schemas["case_retrieval"] = {
        "case_retrieval",
        {{"case_type", protocol::ValueKind::string, true, {"type"}},
         {"query", protocol::ValueKind::string, true, {}}}};
    protocol::ToolCall call{"case_retrieval",
                            protocol::json{{"type", "civil"}, {"query", "key facts"}}};
    CHECK(protocol::validate_call(call, schemas).empty());
}
