#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmd {

enum class ErrorCode {
    InvalidArgument,
    LengthMismatch,
    NonFinite,
    DuplicateTime,
    OutOfDomain,
    NonMonotonePhase,
    GridMismatch,
    AmplitudeTooSmall,
    SinZeroBand,
    EmptyInput,
    InvalidPartition,
    BandOutOfRange,
    NonPositiveVariance,
    InvalidStep,
    LagTooLarge,
    TraceTooShort,
    ParseError,
    IoError,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` identifies the contract that was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mmd
