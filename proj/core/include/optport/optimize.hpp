#ifndef OPTPORT_OPTIMIZE_HPP
#define OPTPORT_OPTIMIZE_HPP

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "optport/errors.hpp"
#include "optport/moments.hpp"

namespace optport {

enum class Objective { variance, cfvar };

struct SolveDiagnostics {
    double min_eig_U = 0.0;
    double cond_U = 0.0;
    bool fallback_used = false; // a scan, not the closed form, picked the point
    std::string note;
};

// The one-dimensional reduction of the CFVaR problem on the budget
// hyperplane.  With G the feasible map (x(eps) = G * (eps, 1)'), the variance
// along the slice is the quadratic A eps^2 + B eps + C built from
// A = 0.5 g1'U g1, B = g1'U g2, C = 0.5 g2'U g2, and the stationarity
// condition squares to qa eps^2 + qb eps + qc = 0 with
//   qa = 4 A^2 q^2 - 4 A,  qb = 4 A B q^2 - 4 B,  qc = B^2 q^2 - 4 C,
// q = normal_quantile(alpha).  eps_star is the admissible root, the one with
// 2 A eps + B > 0.
struct EpsQuadratic {
    double A = 0.0, B = 0.0, C = 0.0;
    double qa = 0.0, qb = 0.0, qc = 0.0;
    double eps_plus = 0.0, eps_minus = 0.0;
    double eps_star = 0.0;
    Eigen::MatrixXd G; // M x 2
};

struct PortfolioSolution {
    Objective objective = Objective::variance;
    Eigen::VectorXd shares;  // x*, normalized to price' x = 1
    Eigen::VectorXd weights; // v .* x / (v' x); sums to one
    double mean = 0.0;       // E[dV . x]
    double variance = 0.0;   // Var[dV . x]
    double cfvar = 0.0;      // at `alpha` when the objective is cfvar, else NaN
    double alpha = 0.0;
    std::optional<EpsQuadratic> eps; // populated for the cfvar objective
    SolveDiagnostics diag;
};

// Unit-budget minimum-variance portfolio, x* = U^{-1} v / (v' U^{-1} v),
// solved by Cholesky (U is never inverted explicitly).  Throws SingularUError
// when U's smallest eigenvalue is <= 1e-12 * ||U||, ZeroPriceError when v is
// identically zero, DimensionError on size mismatch.
PortfolioSolution solve_min_variance(const MomentModel& m, const Eigen::VectorXd& v);

// Unit-budget minimum-CFVaR portfolio.  Pins the expected P&L to eps via the
// two-row constraint map J = [zeta'; v'], reduces to the one-dimensional
// problem above, and picks the admissible stationary point in closed form:
// x* = G (eps_star, 1)'.  A minimum exists iff q^2 A > 1; otherwise the
// objective is unbounded below along the slice and NoStationaryPointError is
// thrown.  If the closed-form sign rule is ambiguous (both or neither root
// admissible) a wide golden-section scan picks the minimizer and the
// diagnostics say so.  A single-position book short-circuits to the unique
// feasible point x = 1/v.  Throws AlphaError outside (0, 1/2), RankError when
// zeta and v are parallel (the mean cannot be steered on the budget
// hyperplane), plus the solve_min_variance error set.
PortfolioSolution solve_min_cfvar(const MomentModel& m, const Eigen::VectorXd& v,
                                  double alpha);

// Value weights w = v .* x / (v' x).  Throws ZeroBudgetError when v' x == 0.
Eigen::VectorXd shares_to_weights(const Eigen::VectorXd& x, const Eigen::VectorXd& v);

} // namespace optport

#endif
