#pragma once

#include <stdexcept>
#include <string>

namespace mechlab {

enum class ErrorKind { Usage, Validation, Numerical };

class Error : public std::runtime_error {
public:
    Error(std::string name, ErrorKind kind, const std::string& msg)
        : std::runtime_error(name + ": " + msg), name_(std::move(name)), kind_(kind) {}
    const std::string& name() const { return name_; }
    ErrorKind kind() const { return kind_; }

private:
    std::string name_;
    ErrorKind kind_;
};

#define MECHLAB_ERROR(Cls, Kind)                                                    \
    class Cls : public Error {                                                      \
    public:                                                                         \
        explicit Cls(const std::string& msg) : Error(#Cls, ErrorKind::Kind, msg) {} \
    };

MECHLAB_ERROR(UsageError, Usage)
MECHLAB_ERROR(ParseError, Validation)
MECHLAB_ERROR(ValidationError, Validation)
MECHLAB_ERROR(ZeroProbabilityContext, Validation)
MECHLAB_ERROR(NonPositiveScale, Validation)
MECHLAB_ERROR(DegenerateSupport, Validation)
MECHLAB_ERROR(SupportTooLarge, Numerical)
MECHLAB_ERROR(StateSpaceTooLarge, Numerical)
MECHLAB_ERROR(LpTooLarge, Numerical)
MECHLAB_ERROR(LpNumericalFailure, Numerical)

#undef MECHLAB_ERROR

}  // namespace mechlab
