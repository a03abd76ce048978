#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace juris {

// Machine-readable error codes carried on the wire inside error tool results
// and by every Error thrown from the library.
enum class ErrorCode {
    ingest_error,
    integrity_error,
    invalid_query,
    invalid_argument,
    not_found,
    policy_violation,
    invalid_state,
    out_of_order,
    invalid_action,
    incomplete_stage,
    terminal_state,
    tool_not_found,
    malformed_call,
    parse_error,
    model_error,
    io_error,
    key_mismatch,
};

constexpr std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ingest_error:     return "ingest_error";
        case ErrorCode::integrity_error:  return "integrity_error";
        case ErrorCode::invalid_query:    return "invalid_query";
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::not_found:        return "not_found";
        case ErrorCode::policy_violation: return "policy_violation";
        case ErrorCode::invalid_state:    return "invalid_state";
        case ErrorCode::out_of_order:     return "out_of_order";
        case ErrorCode::invalid_action:   return "invalid_action";
        case ErrorCode::incomplete_stage: return "incomplete_stage";
        case ErrorCode::terminal_state:   return "terminal_state";
        case ErrorCode::tool_not_found:   return "tool_not_found";
        case ErrorCode::malformed_call:   return "malformed_call";
        case ErrorCode::parse_error:      return "parse_error";
        case ErrorCode::model_error:      return "model_error";
        case ErrorCode::io_error:         return "io_error";
        case ErrorCode::key_mismatch:     return "key_mismatch";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }
    std::string_view code_name() const { return error_code_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace juris
