#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cuefuse {

/// Every failure the library reports. The CLI maps each kind onto an exit code
/// through error_category().
enum class ErrorKind {
    // distributions
    AllZeroCounts,
    DegenerateVector,
    InvalidDistribution,
    // fusion
    DegenerateFusion,
    InvalidFusionConfig,
    InvalidBandTable,
    // annotations
    SchemaError,
    BadLabel,
    BadOutcome,
    EmptyGroup,
    MixedGroup,
    // facesources
    WrongKind,
    InvalidFrame,
    ParseError,
    InvariantViolation,
    // context
    MissingLabel,
    DuplicateLabel,
    MalformedNumber,
    SumOutOfTolerance,
    TransportError,
    TooManyParseFailures,
    CacheCorrupt,
    // metrics
    LengthMismatch,
    EmptyInput,
    KeyMismatch,
    // pipeline
    ConfigError,
    IoError,
    Internal,
};

enum class ErrorCategory { Config, InputData, Network, Internal };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[nodiscard]] std::string_view error_kind_name(ErrorKind kind) noexcept;
[[nodiscard]] ErrorCategory error_category(ErrorKind kind) noexcept;

}  // namespace cuefuse
