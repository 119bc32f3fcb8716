#include "cuefuse/error.hpp"

namespace cuefuse {

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::AllZeroCounts: return "AllZeroCounts";
        case ErrorKind::DegenerateVector: return "DegenerateVector";
        case ErrorKind::InvalidDistribution: return "InvalidDistribution";
        case ErrorKind::DegenerateFusion: return "DegenerateFusion";
        case ErrorKind::InvalidFusionConfig: return "InvalidFusionConfig";
        case ErrorKind::InvalidBandTable: return "InvalidBandTable";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::BadLabel: return "BadLabel";
        case ErrorKind::BadOutcome: return "BadOutcome";
        case ErrorKind::EmptyGroup: return "EmptyGroup";
        case ErrorKind::MixedGroup: return "MixedGroup";
        case ErrorKind::WrongKind: return "WrongKind";
        case ErrorKind::InvalidFrame: return "InvalidFrame";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::MissingLabel: return "MissingLabel";
        case ErrorKind::DuplicateLabel: return "DuplicateLabel";
        case ErrorKind::MalformedNumber: return "MalformedNumber";
        case ErrorKind::SumOutOfTolerance: return "SumOutOfTolerance";
        case ErrorKind::TransportError: return "TransportError";
        case ErrorKind::TooManyParseFailures: return "TooManyParseFailures";
        case ErrorKind::CacheCorrupt: return "CacheCorrupt";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::KeyMismatch: return "KeyMismatch";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

ErrorCategory error_category(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ConfigError:
        case ErrorKind::InvalidFusionConfig:
        case ErrorKind::InvalidBandTable:
            return ErrorCategory::Config;
        case ErrorKind::TransportError:
        case ErrorKind::TooManyParseFailures:
        case ErrorKind::MissingLabel:
        case ErrorKind::DuplicateLabel:
        case ErrorKind::MalformedNumber:
        case ErrorKind::SumOutOfTolerance:
            return ErrorCategory::Network;
        case ErrorKind::DegenerateFusion:
        case ErrorKind::Internal:
            return ErrorCategory::Internal;
        default:
            return ErrorCategory::InputData;
    }
}

}  // namespace cuefuse
