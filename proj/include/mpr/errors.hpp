#ifndef MPR_ERRORS_HPP
#define MPR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mpr {

enum class ErrorCode {
    Ok,
    // data validation
    NonPositiveTime,
    BadIndicator,
    DimensionMismatch,
    NoEvents,
    ConstantColumnNotIntercept,
    // numerics
    NonFiniteResult,
    SingularSystem,
    CalibrationFailed,
    // configuration
    WrongScalarCount,
    MissingAdaptiveWeights,
    InvalidConfig,
    // i/o
    FileNotFound,
    ParseError,
    TooFewPoints,
};

const char* error_code_name(ErrorCode code);

class MprError : public std::runtime_error {
public:
    MprError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::NonPositiveTime: return "NonPositiveTime";
        case ErrorCode::BadIndicator: return "BadIndicator";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NoEvents: return "NoEvents";
        case ErrorCode::ConstantColumnNotIntercept: return "ConstantColumnNotIntercept";
        case ErrorCode::NonFiniteResult: return "NonFiniteResult";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::CalibrationFailed: return "CalibrationFailed";
        case ErrorCode::WrongScalarCount: return "WrongScalarCount";
        case ErrorCode::MissingAdaptiveWeights: return "MissingAdaptiveWeights";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
    }
    return "Unknown";
}

} // namespace mpr

#endif
