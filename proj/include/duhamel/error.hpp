#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace duhamel {

/// Failure categories reported by the library. The CLI maps them onto exit
/// codes: validation problems exit with 1, numerical failures with 2.
enum class ErrorCode {
    InvalidDim,
    InvalidModeCount,
    KindDimMismatch,
    RepresentationMismatch,
    GridMismatch,
    ZeroMass,
    UnsupportedOnBasis,
    NegativeTimeForSemigroup,
    NonSkewSymbol,
    NonEvenSymbol,
    InvalidOrder,
    BadParams,
    UnsupportedEquation,
    NonFiniteState,
    BlowUp,
    ArityMismatch,
    MissingSecondDerivatives,
    DegenerateFit,
    TooFewSamples,
    NonPositiveError,
    InvalidConfig,
    ReferenceDisagreement,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidDim: return "InvalidDim";
    case ErrorCode::InvalidModeCount: return "InvalidModeCount";
    case ErrorCode::KindDimMismatch: return "KindDimMismatch";
    case ErrorCode::RepresentationMismatch: return "RepresentationMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::UnsupportedOnBasis: return "UnsupportedOnBasis";
    case ErrorCode::NegativeTimeForSemigroup: return "NegativeTimeForSemigroup";
    case ErrorCode::NonSkewSymbol: return "NonSkewSymbol";
    case ErrorCode::NonEvenSymbol: return "NonEvenSymbol";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::UnsupportedEquation: return "UnsupportedEquation";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::MissingSecondDerivatives: return "MissingSecondDerivatives";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonPositiveError: return "NonPositiveError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ReferenceDisagreement: return "ReferenceDisagreement";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// True for errors caused by the numerics rather than by the caller's input.
constexpr bool is_numerical_failure(ErrorCode code) {
    return code == ErrorCode::NonFiniteState || code == ErrorCode::BlowUp ||
           code == ErrorCode::ReferenceDisagreement;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the trajectory driver; carries the index of the failing step.
class BlowUpError : public Error {
public:
    BlowUpError(std::size_t step, const std::string& what)
        : Error(ErrorCode::BlowUp, what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) throw Error(code, what);
}

} // namespace duhamel
