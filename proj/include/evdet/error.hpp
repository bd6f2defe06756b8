#pragma once

#include <stdexcept>
#include <string>

namespace evdet {

enum class ErrorKind {
    OutOfBounds,
    NegativeDuration,
    InvalidRange,
    NotCanonical,
    ParseError,
    HeaderMismatch,
    GeometryMismatch,
    DegenerateFps,
    InvalidConfig,
    ZeroWindow,
    NonPositiveBox,
    FpsMismatch,
    DegenerateBox,
    Io,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    bool is_io() const noexcept { return kind_ == ErrorKind::Io; }

private:
    ErrorKind kind_;
};

}  // namespace evdet
