#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toricpo {

enum class ErrorCode {
    DivisionByZero,
    NotInLambda0,
    ZeroLeadingCoefficient,
    InvalidPolytope,
    UnknownName,
    ParamOutOfRange,
    IndexOutOfRange,
    CorrectionNotPositive,
    OutsideDomain,
    DimensionUnsupported,
    PositiveDimensionalInitialLocus,
    EliminationFailed,
    SingularInitialJacobian,
    NoConvergence,
    NotInterior,
    IntegralityFailure,
    LevelUnderdetermined,
    SingularHessian,
    NotMorse,
    UnresolvedMultiplicities,
    ParseError,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NotInLambda0: return "NotInLambda0";
    case ErrorCode::ZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
    case ErrorCode::InvalidPolytope: return "InvalidPolytope";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::CorrectionNotPositive: return "CorrectionNotPositive";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorCode::PositiveDimensionalInitialLocus: return "PositiveDimensionalInitialLocus";
    case ErrorCode::EliminationFailed: return "EliminationFailed";
    case ErrorCode::SingularInitialJacobian: return "SingularInitialJacobian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::IntegralityFailure: return "IntegralityFailure";
    case ErrorCode::LevelUnderdetermined: return "LevelUnderdetermined";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::NotMorse: return "NotMorse";
    case ErrorCode::UnresolvedMultiplicities: return "UnresolvedMultiplicities";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Validation-type failures map to CLI exit code 2, numerical ones to 3.
    bool is_numerical() const noexcept {
        switch (code_) {
        case ErrorCode::DivisionByZero:
        case ErrorCode::ZeroLeadingCoefficient:
        case ErrorCode::PositiveDimensionalInitialLocus:
        case ErrorCode::EliminationFailed:
        case ErrorCode::SingularInitialJacobian:
        case ErrorCode::NoConvergence:
        case ErrorCode::IntegralityFailure:
        case ErrorCode::LevelUnderdetermined:
        case ErrorCode::SingularHessian:
        case ErrorCode::NotMorse:
        case ErrorCode::UnresolvedMultiplicities:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorCode code_;
};

}  // namespace toricpo
