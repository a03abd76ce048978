#include "juris/protocol.hpp"

namespace juris::protocol {

namespace {

// Scans one JSON value starting at `pos` (object/array/string/scalar),
// tracking string and escape state. Returns the index one past the value,
// or npos if the input ends before the value completes.
std::size_t scan_json_value(const std::string& s, std::size_t pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos >= s.size()) return std::string::npos;
    char first = s[pos];
    if (first == '{' || first == '[') {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = pos; i < s.size(); ++i) {
            char c = s[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{' || c == '[') {
                ++depth;
            } else if (c == '}' || c == ']') {
                --depth;
                if (depth == 0) return i + 1;
            }
        }
        return std::string::npos;
    }
    if (first == '"') {
        bool escaped = false;
        for (std::size_t i = pos + 1; i < s.size(); ++i) {
            if (escaped) {
                escaped = false;
            } else if (s[i] == '\\') {
                escaped = true;
            } else if (s[i] == '"') {
                return i + 1;
            }
        }
        return std::string::npos;
    }
    // Bare scalar: runs to the first whitespace or '<'.
    std::size_t i = pos;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '<') ++i;
    return i;
}

TurnSegment make_text(const std::string& raw, std::size_t b, std::size_t e) {
    TurnSegment seg;
    seg.kind = SegmentKind::text;
    seg.begin = b;
    seg.end = e;
    seg.raw = raw.substr(b, e - b);
    return seg;
}

std::optional<ToolCall> try_parse_call(const std::string& payload, std::string& error) {
    json obj = json::parse(payload, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        error = "payload is not a JSON object";
        return std::nullopt;
    }
    if (!obj.contains("name") || !obj["name"].is_string() ||
        obj["name"].get<std::string>().empty()) {
        error = "missing or empty tool name";
        return std::nullopt;
    }
    ToolCall call;
    call.name = obj["name"].get<std::string>();
    if (obj.contains("arguments")) {
        if (!obj["arguments"].is_object()) {
            error = "arguments is not an object";
            return std::nullopt;
        }
        call.arguments = obj["arguments"];
    }
    return call;
}

}  // namespace

std::string to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::text: return "text";
        case SegmentKind::tool_call: return "tool_call";
        case SegmentKind::malformed: return "malformed";
        case SegmentKind::incomplete: return "incomplete";
    }
    return "text";
}

std::vector<TurnSegment> parse_turn(const std::string& raw) {
    std::vector<TurnSegment> segments;
    std::size_t cursor = 0;
    while (cursor < raw.size()) {
        std::size_t open = raw.find(kCallOpen, cursor);
        if (open == std::string::npos) {
            segments.push_back(make_text(raw, cursor, raw.size()));
            break;
        }
        if (open > cursor) segments.push_back(make_text(raw, cursor, open));

        std::size_t payload_begin = open + kCallOpen.size();
        std::size_t payload_end = scan_json_value(raw, payload_begin);

        TurnSegment seg;
        seg.begin = open;

        auto emit_incomplete = [&]() {
            seg.kind = SegmentKind::incomplete;
            seg.end = raw.size();
            seg.raw = raw.substr(seg.begin);
            seg.error = "unterminated tool_call envelope";
            segments.push_back(std::move(seg));
        };

        if (payload_end == std::string::npos) {
            // The value scan ran out of input (open string or unbalanced
            // braces): a truncated stream, not a closed-but-broken one. A
            // literal-close search here could end inside a quoted value and
            // would break the streaming prefix guarantee.
            emit_incomplete();
            break;
        }

        std::size_t close = payload_end;
        while (close < raw.size() && std::isspace(static_cast<unsigned char>(raw[close]))) {
            ++close;
        }
        if (raw.compare(close, kCallClose.size(), kCallClose) == 0) {
            seg.end = close + kCallClose.size();
            seg.raw = raw.substr(seg.begin, seg.end - seg.begin);
            std::string error;
            auto call =
                try_parse_call(raw.substr(payload_begin, payload_end - payload_begin), error);
            if (call) {
                seg.kind = SegmentKind::tool_call;
                seg.call = std::move(call);
            } else {
                seg.kind = SegmentKind::malformed;
                seg.error = error;
            }
            segments.push_back(std::move(seg));
            cursor = segments.back().end;
            continue;
        }
        if (close >= raw.size()) {
            // Payload complete but the stream ended before the closing tag.
            emit_incomplete();
            break;
        }

        // Junk between the payload and the closing tag: resync on the next
        // literal close after the payload.
        std::size_t resync = raw.find(kCallClose, payload_end);
        if (resync == std::string::npos) {
            emit_incomplete();
            break;
        }
        seg.kind = SegmentKind::malformed;
        seg.end = resync + kCallClose.size();
        seg.raw = raw.substr(seg.begin, seg.end - seg.begin);
        seg.error = "malformed payload inside envelope";
        segments.push_back(std::move(seg));
        cursor = segments.back().end;
    }
    return segments;
}

json ToolResult::to_json() const {
    return json{{"payload", payload}, {"is_error", is_error}};
}

std::string render_call(const ToolCall& call) {
    json obj{{"name", call.name}, {"arguments", call.arguments}};
    return std::string(kCallOpen) + obj.dump() + std::string(kCallClose);
}

std::string render_result(const ToolResult& result) {
    std::string body;
    if (!result.is_error && result.payload.is_string()) {
        body = result.payload.get<std::string>();
    } else if (result.is_error) {
        body = json{{"error", result.payload}}.dump();
    } else {
        body = result.payload.dump();
    }
    return std::string(kResultOpen) + body + std::string(kResultClose);
}

std::string render_segments(const std::vector<TurnSegment>& segments) {
    std::string out;
    for (auto& seg : segments) {
        if (seg.kind == SegmentKind::tool_call && seg.raw.empty() && seg.call) {
            out += render_call(*seg.call);
        } else {
            out += seg.raw;
        }
    }
    return out;
}

std::string to_string(ValueKind k) {
    switch (k) {
        case ValueKind::string: return "string";
        case ValueKind::integer: return "integer";
        case ValueKind::number: return "number";
        case ValueKind::boolean: return "boolean";
        case ValueKind::array: return "array";
        case ValueKind::object: return "object";
        case ValueKind::any: return "any";
    }
    return "any";
}

namespace {

bool kind_matches(ValueKind kind, const json& value) {
    switch (kind) {
        case ValueKind::string: return value.is_string();
        case ValueKind::integer: return value.is_number_integer();
        case ValueKind::number: return value.is_number();
        case ValueKind::boolean: return value.is_boolean();
        case ValueKind::array: return value.is_array();
        case ValueKind::object: return value.is_object();
        case ValueKind::any: return true;
    }
    return true;
}

}  // namespace

std::vector<std::string> validate_call(const ToolCall& call, const SchemaMap& schemas) {
    std::vector<std::string> violations;
    auto it = schemas.find(call.name);
    if (it == schemas.end()) {
        violations.push_back("unknown tool '" + call.name + "'");
        return violations;
    }
    for (auto& arg : it->second.args) {
        const json* value = nullptr;
        if (call.arguments.contains(arg.name)) {
            value = &call.arguments.at(arg.name);
        } else {
            for (auto& alias : arg.aliases) {
                if (call.arguments.contains(alias)) {
                    value = &call.arguments.at(alias);
                    break;
                }
            }
        }
        if (!value) {
            if (arg.required) violations.push_back("missing: " + arg.name);
            continue;
        }
        if (!kind_matches(arg.kind, *value)) {
            violations.push_back("wrong kind: " + arg.name + " expects " + to_string(arg.kind));
        }
    }
    return violations;
}

}  // namespace juris::protocol
