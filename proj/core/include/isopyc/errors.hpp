#pragma once

#include <stdexcept>
#include <string>

namespace isopyc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };

// domain_core
struct StabilityViolation : Error { using Error::Error; };
struct CavitationViolation : Error { using Error::Error; };

// isopycnal operators
struct JacobianDegenerate : Error { using Error::Error; };

// pressure solver
struct CompatibilityDefect : Error { using Error::Error; };
struct NoConvergence : Error {
    int iterations;
    double residual;
    NoConvergence(int it, double res)
        : Error("linear solver did not converge: " + std::to_string(it) +
                " iterations, residual " + std::to_string(res)),
          iterations(it), residual(res) {}
};

// dynamics
struct DomainEscape : Error { using Error::Error; };
struct CFLViolation : Error { using Error::Error; };
struct BlownUpError : Error { using Error::Error; };

// euler bridge
struct MonotonicityViolation : Error { using Error::Error; };
struct RootFindFailure : Error { using Error::Error; };
struct InterpolationDomain : Error { using Error::Error; };

// io
struct IOFailure : Error { using Error::Error; };
struct FormatMismatch : Error { using Error::Error; };

// diagnostics
struct InsufficientData : Error { using Error::Error; };

} // namespace isopyc
