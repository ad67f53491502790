#include "mkdvq/errors.hpp"

#include <mutex>

#include <gsl/gsl_errno.h>

namespace mkdvq {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::NonDecayingTail: return "NonDecayingTail";
        case ErrorKind::StepFailure: return "StepFailure";
        case ErrorKind::ZeroOfA: return "ZeroOfA";
        case ErrorKind::ZeroOfD: return "ZeroOfD";
        case ErrorKind::ReflectionTooLarge: return "ReflectionTooLarge";
        case ErrorKind::DomainViolation: return "DomainViolation";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
        case ErrorKind::NonRealRecovery: return "NonRealRecovery";
        case ErrorKind::TruncationFailure: return "TruncationFailure";
        case ErrorKind::StripTooNarrow: return "StripTooNarrow";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::PoleOutsideRange: return "PoleOutsideRange";
        case ErrorKind::GammaEvaluationFailure: return "GammaEvaluationFailure";
        case ErrorKind::SectorViolation: return "SectorViolation";
        case ErrorKind::PoleProximity: return "PoleProximity";
        case ErrorKind::BlowUp: return "BlowUp";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::CFLViolation: return "CFLViolation";
        case ErrorKind::NaNDetected: return "NaNDetected";
        case ErrorKind::MissingReport: return "MissingReport";
    }
    return "Unknown";
}

void gsl_status_mode() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

}  // namespace mkdvq
