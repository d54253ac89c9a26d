#include "cascade_branch/error.hpp"

namespace cascade_branch {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MissingHeader: return "MissingHeader";
    case ErrorKind::MixedTimestampFormats: return "MixedTimestampFormats";
    case ErrorKind::NoSeeds: return "NoSeeds";
    case ErrorKind::UptoZero: return "UptoZero";
    case ErrorKind::KOutOfRange: return "KOutOfRange";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::UnknownGeneration: return "UnknownGeneration";
    case ErrorKind::InvalidSeries: return "InvalidSeries";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

} // namespace cascade_branch
