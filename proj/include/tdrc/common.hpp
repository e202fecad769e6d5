#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tdrc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Kernel evaluated outside its domain (e.g. negative base with fractional exponent).
struct DomainError : Error {
    using Error::Error;
};

/// A computed quantity overflowed or a trajectory escaped to non-finite values.
struct NonFiniteError : Error {
    using Error::Error;
};

/// The supplied point does not satisfy f(x0, 0) = x0 within tolerance.
struct NotAnEquilibriumError : Error {
    using Error::Error;
};

/// A linear system is numerically singular.
struct SingularError : Error {
    using Error::Error;
};

/// The VAR coefficient matrix has spectral radius >= 1; no stationary solution.
struct UnstableError : Error {
    using Error::Error;
};

/// Fewer input moments supplied than the Taylor order requires.
struct MomentLengthError : Error {
    using Error::Error;
};

/// Degenerate parameter value (e.g. Phi = 0 in the characteristic polynomial).
struct DegenerateError : Error {
    using Error::Error;
};

/// Target variance is zero or negative; NMSE undefined.
struct NonPositiveVarianceError : Error {
    using Error::Error;
};

/// Vector/matrix sizes do not match the task definition.
struct DimensionError : Error {
    using Error::Error;
};

/// Every optimization start point was infeasible.
struct NoFeasiblePointError : Error {
    using Error::Error;
};

/// Configuration file failed validation.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace tdrc
