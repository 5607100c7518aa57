#pragma once

#include <stdexcept>
#include <string>

namespace approxsym {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

#define APPROXSYM_ERROR(Name)         \
    class Name : public Error {       \
    public:                           \
        using Error::Error;           \
    };

APPROXSYM_ERROR(NotPolynomial)
APPROXSYM_ERROR(DerivativeOverflow)
APPROXSYM_ERROR(SingularAtEpsZero)
APPROXSYM_ERROR(OrderMismatch)
APPROXSYM_ERROR(MissingFamilyIndex)
APPROXSYM_ERROR(CacheMissing)
APPROXSYM_ERROR(NotAVariationalSymmetry)
APPROXSYM_ERROR(FormulaMismatch)
APPROXSYM_ERROR(CannotSolveForLeadingDerivative)
APPROXSYM_ERROR(AnsatzIncomplete)
APPROXSYM_ERROR(UnboundSymbol)
APPROXSYM_ERROR(NonFiniteState)
APPROXSYM_ERROR(UnknownModel)
APPROXSYM_ERROR(ModelError)

#undef APPROXSYM_ERROR

/// Raised when elimination needs to know whether a constant expression vanishes.
class SymbolicPivotAmbiguity : public Error {
public:
    SymbolicPivotAmbiguity(const std::string& pivot)
        : Error("cannot decide whether pivot is nonzero: " + pivot), pivot_(pivot) {}
    const std::string& pivot() const { return pivot_; }

private:
    std::string pivot_;
};

}  // namespace approxsym
