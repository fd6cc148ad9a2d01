#include "mmd/error.hpp"

namespace mmd {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::DuplicateTime: return "DuplicateTime";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NonMonotonePhase: return "NonMonotonePhase";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::AmplitudeTooSmall: return "AmplitudeTooSmall";
        case ErrorCode::SinZeroBand: return "SinZeroBand";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidPartition: return "InvalidPartition";
        case ErrorCode::BandOutOfRange: return "BandOutOfRange";
        case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
        case ErrorCode::InvalidStep: return "InvalidStep";
        case ErrorCode::LagTooLarge: return "LagTooLarge";
        case ErrorCode::TraceTooShort: return "TraceTooShort";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace mmd
