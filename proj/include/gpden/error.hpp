#pragma once

#include <stdexcept>
#include <string>

namespace gpden {

enum class ErrorKind {
    InvalidArgument,
    GridMismatch,
    NonFinite,
    NotConverged,
    NonConfining,
    Config,
    Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind` drives the CLI exit code and
// `field` carries the config path when the error comes from validation.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string field = {})
        : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& field() const { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

} // namespace gpden
