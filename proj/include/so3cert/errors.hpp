#pragma once

#include <stdexcept>
#include <string>

namespace so3cert {

/// Base class for all contract violations raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// vee() received a matrix whose symmetric part exceeds tolerance.
struct NotSkew : Error {
    explicit NotSkew(const std::string& msg) : Error(msg) {}
};

/// Quaternionic error map evaluated too close to a 180 degree rotation.
struct NearAntipodal : Error {
    explicit NearAntipodal(const std::string& msg) : Error(msg) {}
};

/// project_so3() received a singular or reflection-like matrix.
struct Degenerate : Error {
    explicit Degenerate(const std::string& msg) : Error(msg) {}
};

/// A scalar controller gain that must be positive is not.
struct NonPositiveGain : Error {
    explicit NonPositiveGain(const std::string& msg) : Error(msg) {}
};

/// A gain matrix that must be symmetric positive definite is not.
struct NotSPD : Error {
    explicit NotSPD(const std::string& msg) : Error(msg) {}
};

/// Transfer function has numerator degree above denominator degree.
struct ImproperTF : Error {
    explicit ImproperTF(const std::string& msg) : Error(msg) {}
};

/// Operands have incompatible dimensions.
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// A matrix that must be symmetric is not within tolerance.
struct NotSymmetric : Error {
    explicit NotSymmetric(const std::string& msg) : Error(msg) {}
};

/// Feasibility problem is malformed (linearly dependent equality rows).
struct IllPosed : Error {
    explicit IllPosed(const std::string& msg) : Error(msg) {}
};

/// Inertia matrix is not invertible.
struct SingularInertia : Error {
    explicit SingularInertia(const std::string& msg) : Error(msg) {}
};

/// Closed loop is unstable where a stable one is required.
struct UnstableLoop : Error {
    explicit UnstableLoop(const std::string& msg) : Error(msg) {}
};

/// Loop gain never crosses unity on the searched frequency grid.
struct NoCrossover : Error {
    explicit NoCrossover(const std::string& msg) : Error(msg) {}
};

/// Iterative eigensolver failed to converge.
struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

/// Controller family name not recognized.
struct UnknownController : Error {
    explicit UnknownController(const std::string& msg) : Error(msg) {}
};

/// Input file missing, unreadable, or failing schema validation.
struct InputError : Error {
    explicit InputError(const std::string& msg) : Error(msg) {}
};

}  // namespace so3cert
