#pragma once

#include <stdexcept>
#include <string>

namespace fracurv {

/// Failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
    InvalidInput,
    DegenerateGeometry,
    Parse,
    EmptyForeground,
    InsufficientData,
    SingularDesign,
    Divergence,
    NotAvailable,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Thrown by the PBM reader; carries the byte offset at which parsing failed.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : Error(ErrorKind::Parse, what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace fracurv
