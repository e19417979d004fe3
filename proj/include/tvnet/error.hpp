#pragma once

#include <stdexcept>
#include <string>

namespace tvnet {

// Broad failure classes; the CLI maps these onto exit codes 1/2/3.
enum class ErrorKind { Validation, Numeric, IO };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define TVNET_DEFINE_ERROR(Name, Kind)                                   \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(Kind, what) {}    \
    };

TVNET_DEFINE_ERROR(ParseError, ErrorKind::IO)
TVNET_DEFINE_ERROR(FormatError, ErrorKind::IO)
TVNET_DEFINE_ERROR(IoError, ErrorKind::IO)
TVNET_DEFINE_ERROR(MissingDataError, ErrorKind::Validation)
TVNET_DEFINE_ERROR(DomainError, ErrorKind::Validation)
TVNET_DEFINE_ERROR(ShapeError, ErrorKind::Validation)
TVNET_DEFINE_ERROR(ValidationError, ErrorKind::Validation)
TVNET_DEFINE_ERROR(InsufficientDataError, ErrorKind::Numeric)
TVNET_DEFINE_ERROR(DegenerateWindowError, ErrorKind::Numeric)
TVNET_DEFINE_ERROR(SingularDesignError, ErrorKind::Numeric)
TVNET_DEFINE_ERROR(InfeasibleError, ErrorKind::Numeric)
TVNET_DEFINE_ERROR(SelectionError, ErrorKind::Numeric)
TVNET_DEFINE_ERROR(NumericError, ErrorKind::Numeric)

#undef TVNET_DEFINE_ERROR

/// Raised when an iterative solver hits its iteration cap; carries the
/// last optimality residual so callers can decide whether it is usable.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(ErrorKind::Numeric, what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Re-raises e with a "<stage>: " prefix, keeping its failure class.
[[noreturn]] inline void rethrow_in_stage(const Error& e, const std::string& stage) {
    throw Error(e.kind(), stage + ": " + e.what());
}

}  // namespace tvnet
