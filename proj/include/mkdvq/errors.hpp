#pragma once

#include <stdexcept>
#include <string>

namespace mkdvq {

enum class ErrorKind {
    Config,
    NonDecayingTail,
    StepFailure,
    ZeroOfA,
    ZeroOfD,
    ReflectionTooLarge,
    DomainViolation,
    SingularSystem,
    ResidualTooLarge,
    NonRealRecovery,
    TruncationFailure,
    StripTooNarrow,
    QuadratureFailure,
    PoleOutsideRange,
    GammaEvaluationFailure,
    SectorViolation,
    PoleProximity,
    BlowUp,
    InsufficientData,
    CFLViolation,
    NaNDetected,
    MissingReport,
};

const char* to_string(ErrorKind k);

/// Switches GSL to status-code error reporting (once per process); every GSL
/// caller in the library converts bad statuses into Error. The handler is
/// process-global, so it is never swapped back and forth.
void gsl_status_mode();

/// Every numerical or validation failure raised by the library.
/// Config errors map to CLI exit code 2, everything else to 1.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace mkdvq
