#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cascade_branch {

enum class ErrorKind {
    MalformedLine,
    EmptyInput,
    MissingHeader,
    MixedTimestampFormats,
    NoSeeds,
    UptoZero,
    KOutOfRange,
    InvalidParams,
    UnknownGeneration,
    InvalidSeries,
    Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace cascade_branch
