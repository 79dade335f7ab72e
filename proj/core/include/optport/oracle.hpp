#ifndef OPTPORT_ORACLE_HPP
#define OPTPORT_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optport/errors.hpp"
#include "optport/gosset.hpp"
#include "optport/moments.hpp"
#include "optport/optimize.hpp"

namespace optport {

// Outcome of one analytic-vs-simulation comparison.  tolerance is the
// acceptance band actually applied (k_se standard errors for Monte Carlo
// checks); a fixed (quantity, seed, samples) triple always reproduces the
// same report bit for bit.
struct VerificationReport {
    std::string quantity;
    double analytic = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
};

struct MomentCheck {
    VerificationReport mean;
    VerificationReport variance;
};

// Simulates the delta-gamma P&L dV.x = sum_m x_m (dt theta_m + delta_m.dS
// + 0.5 dS' Gamma_m dS) under dS ~ multivariate t(mu, Sigma, nu) and compares
// sample mean and variance against the analytic model.  Draws are streamed
// through 200 batches; the variance standard error is the larger of a
// delete-one-batch jackknife and a seeded batch bootstrap, so heavy-tailed
// fourth moments cannot silently shrink the band.  Throws
// InsufficientSamplesError when n < 2000.
MomentCheck mc_moments(const std::vector<GreekSet>& book, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& Sigma, double nu, double dt,
                       const Eigen::VectorXd& x, const MomentModel& analytic,
                       std::size_t n, std::uint64_t seed, double k_se = 3.0);

// Empirical value-at-risk of a P&L sample: the alpha lower quantile of pnl
// with floor interpolation, negated.  Throws InsufficientSamplesError when
// fewer than 10/alpha samples are supplied, AlphaError outside (0, 1).
double empirical_var(const std::vector<double>& pnl, double alpha);

struct BruteForceResult {
    Eigen::VectorXd shares;
    double value = 0.0;
    bool converged = false; // best-found is still returned when false
};

// Derivative-free check of the closed-form solvers: minimizes the requested
// objective over the affine slice v'x = 1 (parametrized through an
// orthonormal basis of the hyperplane) with Nelder-Mead from `restarts`
// seeded random starts plus a polish run.  alpha is ignored for the variance
// objective.
BruteForceResult brute_force_optimum(Objective obj, const MomentModel& m,
                                     const Eigen::VectorXd& v, double alpha = 0.01,
                                     std::uint64_t seed = 42, int restarts = 20);

// Golden-section minimizer for one-dimensional cross-checks.  f must be
// unimodal on [lo, hi].
double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-12, int max_iter = 400);

// Black-Scholes reference price (lognormal returns), used as the large-nu
// limit check of the truncated-t pricer.  sigma = 0 or expiry = 0 degrade to
// the discounted forward intrinsic value.
double black_scholes(OptionKind kind, double S0, double sigma, double strike,
                     double expiry, double r,
                     Discounting disc = Discounting::present_value);

} // namespace optport

#endif
