#ifndef OPTPORT_MOMENTS_HPP
#define OPTPORT_MOMENTS_HPP

#include <vector>

#include <Eigen/Dense>

#include "optport/errors.hpp"
#include "optport/gosset.hpp"

namespace optport {

// Exact first and second moments of the delta-gamma P&L over one horizon dt,
//
//   dV_m = dt * theta_m + delta_m . dS + 0.5 * dS' Gamma_m dS,
//
// when dS is multivariate Student-t with location mu, scale Sigma and tail
// index nu.  For a share vector x:
//
//   E[dV . x]   = zeta' x
//   Var[dV . x] = 0.5 * x' U x
//
// The intermediates are kept for diagnostics: p_m = tr(Gamma_m Sigma),
// xi_m = 0.5 mu' Gamma_m mu, r_ij = tr(Gamma_i Sigma Gamma_j Sigma), D the
// N x M delta block, B the M x N matrix with rows (Gamma_m mu)'.
struct MomentModel {
    Eigen::VectorXd zeta; // M
    Eigen::MatrixXd U;    // M x M, symmetric positive semidefinite
    double nu = 0.0;
    double dt = 0.0;

    Eigen::VectorXd p;
    Eigen::VectorXd xi;
    Eigen::VectorXd theta;
    Eigen::MatrixXd D;
    Eigen::MatrixXd R;
    Eigen::MatrixXd B;

    Eigen::Index positions() const { return zeta.size(); }
};

// Assembles zeta and U:
//
//   zeta = dt * theta + D' mu + nu / (2 (nu - 2)) * p + xi
//   U    = 2 nu / (nu - 2) * (D' + B) Sigma (D' + B)'
//        + nu^2 / ((nu - 2)(nu - 4)) * R
//        + 0.5 * (nu^2 / ((nu - 2)(nu - 4)) - (nu / (nu - 2))^2) * p p'
//
// The R and p p' coefficients are what make 0.5 x' U x the exact variance of
// the quadratic form; in the scalar pure-gamma case they reproduce
// Var(0.5 gamma Y^2) = 0.25 gamma^2 Sigma^2 (3 c - (nu/(nu-2))^2) with
// c = nu^2 / ((nu-2)(nu-4)), and as nu -> inf the classic normal delta-gamma
// variance delta' Sigma delta + 0.5 tr((Gamma Sigma)^2) is recovered.  The
// Monte Carlo engine in the oracle module checks both in the test suite.
//
// Throws NuError when nu <= 4 (the quadratic form has no variance),
// DimensionError on inconsistent shapes, DomainError when dt <= 0.
MomentModel build_moment_model(const std::vector<GreekSet>& book,
                               const Eigen::VectorXd& mu,
                               const Eigen::MatrixXd& Sigma, double nu, double dt);

// zeta' x
double portfolio_mean(const MomentModel& m, const Eigen::VectorXd& x);

// 0.5 x' U x, clamped at zero against rounding.
double portfolio_variance(const MomentModel& m, const Eigen::VectorXd& x);

// Two-moment tail bound on the loss -dV . x at level alpha in (0, 1/2):
//   cfvar2 = -E[dV.x] - normal_quantile(alpha) * sqrt(Var[dV.x]).
// Throws AlphaError outside (0, 1/2).
double cfvar2(const MomentModel& m, const Eigen::VectorXd& x, double alpha);

} // namespace optport

#endif
