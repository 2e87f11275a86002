#pragma once

#include <stdexcept>
#include <string>

namespace sbiga {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Query parameter outside the admissible domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Knot insertion / degree elevation request that would violate the
/// multiplicity rules of the target knot vector.
class RefinementError : public Error {
public:
    using Error::Error;
};

/// Operation requires structure (scaled-boundary flags, closed curve,
/// invertible mass matrix, ...) that the argument does not have.
class StructureError : public Error {
public:
    using Error::Error;
};

/// Attempt to violate a control-net or DoF constraint.
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// Non-finite integrand sample or otherwise broken assembly input.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Non-positive Jacobian determinant at a quadrature node.
class RegularityError : public Error {
public:
    using Error::Error;
};

/// Linear solve failed to meet its residual contract.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Mode-matching system too ill-conditioned to trust.
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// Eigen decomposition defect beyond the handled zero-exponent pair.
class DefectError : public Error {
public:
    using Error::Error;
};

/// Geometry file violates the document schema. Carries the 1-based line
/// number of the first offending line (0 if not line-specific).
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace sbiga
