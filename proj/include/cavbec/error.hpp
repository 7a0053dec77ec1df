#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cavbec {

enum class ErrorKind {
    // input validation (CLI exit 2)
    InvalidParameter,
    UnknownPreset,
    // numeric / physics failures (CLI exit 3)
    NoStableBranch,
    AmbiguousBranch,
    InconsistentStability,
    OverdampedMode,
    ComplexRoot,
    NegativeSquare,
    PoleOnGrid,
    SingularResolvent,
    EmptyCurve,
    OutOfRange,
};

std::string_view to_string(ErrorKind kind);

// True for the kinds that signal bad input rather than a numeric outcome.
bool is_validation(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string field = {})
        : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

    ErrorKind kind() const noexcept { return kind_; }
    // Offending input field, if the error is tied to one.
    const std::string& field() const noexcept { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message, std::string field = {}) {
    throw Error(kind, message, std::move(field));
}

}  // namespace cavbec
