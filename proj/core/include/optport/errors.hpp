#ifndef OPTPORT_ERRORS_HPP
#define OPTPORT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace optport {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input file could not be read or decoded (bad JSON, bad CSV, missing field).
struct ParseError : Error {
    using Error::Error;
};

// Input decoded fine but violates a model invariant (dimension mismatch,
// correlation matrix not positive definite, non-positive spot, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of a function (nu <= 0, p outside
// (0,1), negative volatility, ...).
struct DomainError : Error {
    using Error::Error;
};

// A Cholesky factorization failed: the matrix is not positive definite.
struct CholeskyError : Error {
    using Error::Error;
};

// Adaptive quadrature could not meet the requested tolerance.
struct QuadratureError : Error {
    using Error::Error;
};

// The option's log-moneyness boundary falls outside the truncated support on
// the side where the integrand must vanish, so the truncated price is not
// defined for this contract.
struct TruncationError : Error {
    using Error::Error;
};

// A finite-difference bump pushed an evaluation across the truncated support
// boundary; the stencil is invalid at this step size.
struct StepError : Error {
    using Error::Error;
};

// Tail-index nu too small for the requested moment (variance needs nu > 4).
struct NuError : Error {
    using Error::Error;
};

// Inconsistent array or matrix dimensions.
struct DimensionError : Error {
    using Error::Error;
};

// Confidence level alpha outside (0, 1/2).
struct AlphaError : Error {
    using Error::Error;
};

// The loss covariance matrix U is singular or indefinite within tolerance.
struct SingularUError : Error {
    using Error::Error;
};

// The price vector is identically zero, so no budget-normalized portfolio
// exists.
struct ZeroPriceError : Error {
    using Error::Error;
};

// The mean/budget constraint pair is rank deficient (expected-loss vector
// parallel to the price vector).
struct RankError : Error {
    using Error::Error;
};

// The risk objective has no interior minimum on the budget hyperplane (it is
// unbounded below along the mean direction).
struct NoStationaryPointError : Error {
    using Error::Error;
};

// Portfolio value is zero; weights are undefined.
struct ZeroBudgetError : Error {
    using Error::Error;
};

// Too few Monte Carlo samples for the requested tail statistic.
struct InsufficientSamplesError : Error {
    using Error::Error;
};

// An iterative routine hit its iteration cap before reaching tolerance.
struct NonConvergenceError : Error {
    using Error::Error;
};

} // namespace optport

#endif
