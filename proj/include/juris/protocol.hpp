#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace juris::protocol {

using json = nlohmann::json;

inline constexpr std::string_view kCallOpen = "<tool_call>";
inline constexpr std::string_view kCallClose = "</tool_call>";
inline constexpr std::string_view kResultOpen = "<tool_call_result>";
inline constexpr std::string_view kResultClose = "</tool_call_result>";

struct ToolCall {
    std::string name;
    json arguments = json::object();
};

struct ToolResult {
    json payload;  // string or structured object
    bool is_error = false;

    static ToolResult ok(json payload) { return {std::move(payload), false}; }
    static ToolResult error(const std::string& code, const std::string& message) {
        return {json{{"code", code}, {"message", message}}, true};
    }
    json to_json() const;
};

enum class SegmentKind { text, tool_call, malformed, incomplete };

std::string to_string(SegmentKind k);

// One piece of a model turn. Segments partition the raw turn: spans are
// non-overlapping, ordered, and concatenate back to the input.
struct TurnSegment {
    SegmentKind kind = SegmentKind::text;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string raw;                  // raw[begin:end]
    std::optional<ToolCall> call;     // set for kind == tool_call
    std::string error;                // set for kind == malformed
};

// Splits a raw model turn into text and tool-call segments.
//
// A well-formed `<tool_call>{json}</tool_call>` block becomes a tool_call
// segment. A block whose payload is not a valid call object becomes a
// malformed segment covering the whole envelope; parsing continues after
// it. An opened envelope with no closing tag becomes a single incomplete
// segment at the end (truncated stream). The JSON payload is scanned
// string-aware, so envelope markers inside quoted values never terminate a
// block.
std::vector<TurnSegment> parse_turn(const std::string& raw);

std::string render_call(const ToolCall& call);
std::string render_result(const ToolResult& result);
// Inverse of parse for fuzzing: concatenates rendered segments.
std::string render_segments(const std::vector<TurnSegment>& segments);

// Argument schema declarations for validate_call.
enum class ValueKind { string, integer, number, boolean, array, object, any };

std::string to_string(ValueKind k);

struct ArgSpec {
    std::string name;
    ValueKind kind = ValueKind::any;
    bool required = false;
    std::vector<std::string> aliases;  // accepted alternative argument keys
};

struct CallSchema {
    std::string tool;
    std::vector<ArgSpec> args;
};

using SchemaMap = std::map<std::string, CallSchema>;

// Returns an empty vector when the call satisfies the schema; otherwise one
// human-readable violation per problem (unknown tool, missing required
// argument, wrong value kind).
std::vector<std::string> validate_call(const ToolCall& call, const SchemaMap& schemas);

}  // namespace juris::protocol
