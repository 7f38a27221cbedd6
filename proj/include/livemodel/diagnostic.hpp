#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "livemodel/ast.hpp"

namespace livemodel {

enum class Severity { Error, Warning };

// Stable diagnostic codes surfaced on the wire.
namespace codes {
inline constexpr const char* kSyntax = "SYNTAX_ERROR";
inline constexpr const char* kUnsupported = "UNSUPPORTED_FEATURE";
inline constexpr const char* kUnknownName = "UNKNOWN_NAME";
inline constexpr const char* kDuplicateName = "DUPLICATE_NAME";
inline constexpr const char* kCyclicHierarchy = "CYCLIC_HIERARCHY";
inline constexpr const char* kArity = "ARITY_ERROR";
inline constexpr const char* kType = "TYPE_ERROR";
inline constexpr const char* kVacuousJoin = "VACUOUS_JOIN";
}  // namespace codes

struct Diagnostic {
    Severity severity = Severity::Error;
    Span span;
    std::string message;
    std::string code;
    std::vector<std::string> expected;  // syntax errors: expected tokens

    bool is_error() const { return severity == Severity::Error; }
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.is_error()) return true;
    return false;
}

/// Errors raised by the engine's API calls (as opposed to model diagnostics).
enum class ErrorCode {
    StructuralMismatch,
    ScopeTooLarge,
    Cancelled,
    UnboundVariable,
    VacuousPrefix,
    NoPrefixContext,
    SessionNotFound,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace livemodel
