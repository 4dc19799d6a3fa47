#ifndef HOAIRY_ERRORS_HPP
#define HOAIRY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hoairy {

/// Machine-readable failure category. The CLI maps these onto exit codes.
enum class ErrorKind {
    NotExact,
    DimensionMismatch,
    IdentityViolation,
    NotMonic,
    SectorViolation,
    NonConvergence,
    NumericalBreakdown,
    StencilFailure,
    WeightCollision,
    SeedTooLarge,
    StepFailure,
    TrustWindowEmpty,
    TailTooLarge,
    InvalidArgument,
    ParseError,
    ConfigError,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotExact: return "NotExact";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IdentityViolation: return "IdentityViolation";
    case ErrorKind::NotMonic: return "NotMonic";
    case ErrorKind::SectorViolation: return "SectorViolation";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::StencilFailure: return "StencilFailure";
    case ErrorKind::WeightCollision: return "WeightCollision";
    case ErrorKind::SeedTooLarge: return "SeedTooLarge";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::TrustWindowEmpty: return "TrustWindowEmpty";
    case ErrorKind::TailTooLarge: return "TailTooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for failures of the numerical machinery (as opposed to bad input).
    bool is_numerical() const noexcept {
        switch (kind_) {
        case ErrorKind::NonConvergence:
        case ErrorKind::NumericalBreakdown:
        case ErrorKind::StencilFailure:
        case ErrorKind::StepFailure:
        case ErrorKind::TrustWindowEmpty:
        case ErrorKind::TailTooLarge:
        case ErrorKind::SeedTooLarge:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace hoairy

#endif // HOAIRY_ERRORS_HPP
