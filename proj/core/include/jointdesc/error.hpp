#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jointdesc {

enum class ErrorKind {
    MissingCell,
    SizeLimit,
    ParseError,
    RationalizeError,
    DimensionMismatch,
    WrongScenario,
    NoFriend,
    NotInfeasible,
    Unnormalized,
    NonUnitary,
    NotFound,
    EmptyCounts,
    CapExceeded,
    ZeroBase,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library. The kind is what callers switch on;
// the message carries the diagnostics (indices, line/field, limits).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace jointdesc
