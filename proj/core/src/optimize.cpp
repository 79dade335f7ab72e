#include "optport/optimize.hpp"

#include <cmath>
#include <limits>

#include "optport/student_t.hpp"

namespace optport {

namespace {

struct CholeskyU {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double min_eig = 0.0;
    double max_eig = 0.0;
};

// Factorizes U, rejecting singular or indefinite matrices relative to ||U||.
CholeskyU factor_U(const MomentModel& m) {
    const Eigen::MatrixXd& U = m.U;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(U, Eigen::EigenvaluesOnly);
    CholeskyU f;
    f.min_eig = es.eigenvalues().minCoeff();
    f.max_eig = es.eigenvalues().maxCoeff();
    const double scale = U.norm();
    if (!(f.min_eig > 1e-12 * scale))
        throw SingularUError("loss covariance U is singular within tolerance "
                             "(min eigenvalue " +
                             std::to_string(f.min_eig) + ", ||U|| = " +
                             std::to_string(scale) + ")");
    f.llt.compute(U);
    if (f.llt.info() != Eigen::Success)
        throw SingularUError("Cholesky factorization of U failed");
    return f;
}

void check_prices(const MomentModel& m, const Eigen::VectorXd& v) {
    if (v.size() != m.positions())
        throw DimensionError("price vector size must match the number of positions");
    if (v.isZero(0.0)) throw ZeroPriceError("price vector is identically zero");
}

void fill_common(PortfolioSolution& s, const MomentModel& m, const Eigen::VectorXd& v) {
    s.weights = shares_to_weights(s.shares, v);
    s.mean = portfolio_mean(m, s.shares);
    s.variance = portfolio_variance(m, s.shares);
}

// Golden-section minimization of a unimodal slice; used only by the fallback
// path when the closed-form root selection is ambiguous.
template <class F>
double golden_min(const F& f, double lo, double hi, int iters = 200) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a); f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

Eigen::VectorXd shares_to_weights(const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    if (x.size() != v.size())
        throw DimensionError("shares and prices must have the same size");
    const double budget = v.dot(x);
    if (budget == 0.0)
        throw ZeroBudgetError("portfolio value is zero; weights are undefined");
    return v.cwiseProduct(x) / budget;
}

PortfolioSolution solve_min_variance(const MomentModel& m, const Eigen::VectorXd& v) {
    check_prices(m, v);
    auto f = factor_U(m);

    const Eigen::VectorXd y = f.llt.solve(v);
    const double denom = v.dot(y);
    if (!(denom > 0.0))
        throw SingularUError("v' U^{-1} v is not positive; U is numerically indefinite");

    PortfolioSolution s;
    s.objective = Objective::variance;
    s.shares = y / denom;
    s.cfvar = std::numeric_limits<double>::quiet_NaN();
    s.alpha = std::numeric_limits<double>::quiet_NaN();
    s.diag.min_eig_U = f.min_eig;
    s.diag.cond_U = f.max_eig / f.min_eig;
    fill_common(s, m, v);
    return s;
}

PortfolioSolution solve_min_cfvar(const MomentModel& m, const Eigen::VectorXd& v,
                                  double alpha) {
    if (!(alpha > 0.0) || !(alpha < 0.5))
        throw AlphaError("alpha must lie strictly inside (0, 1/2)");
    check_prices(m, v);

    // A single position is fully determined by the budget; nothing to steer.
    if (m.positions() == 1) {
        auto f1 = factor_U(m);
        PortfolioSolution s;
        s.objective = Objective::cfvar;
        s.alpha = alpha;
        s.shares = Eigen::VectorXd::Constant(1, 1.0 / v[0]);
        s.diag.min_eig_U = f1.min_eig;
        s.diag.cond_U = f1.max_eig / f1.min_eig;
        s.diag.note = "single position: the budget constraint fixes the portfolio";
        fill_common(s, m, v);
        s.cfvar = cfvar2(m, s.shares, alpha);
        return s;
    }

    const Eigen::VectorXd& zeta = m.zeta;
    if (zeta.isZero(0.0))
        throw RankError("expected P&L vector is zero; the mean cannot be steered");
    // zeta parallel to v makes the constraint pair rank deficient.
    const double cosang = std::abs(zeta.dot(v)) / (zeta.norm() * v.norm());
    if (cosang >= 1.0 - 1e-12)
        throw RankError("expected P&L vector is parallel to the price vector");

    auto f = factor_U(m);
    const Eigen::Index M = m.positions();

    Eigen::MatrixXd Jt(M, 2); // columns: zeta, v
    Jt.col(0) = zeta;
    Jt.col(1) = v;
    const Eigen::MatrixXd X = f.llt.solve(Jt);     // U^{-1} J'
    const Eigen::Matrix2d S = Jt.transpose() * X;  // J U^{-1} J'
    const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
    if (!(det > 1e-28 * S(0, 0) * S(1, 1)))
        throw RankError("constraint Gram matrix is numerically singular");
    Eigen::Matrix2d Sinv;
    Sinv << S(1, 1), -S(0, 1), -S(1, 0), S(0, 0);
    Sinv /= det;

    EpsQuadratic eq;
    eq.G = X * Sinv; // M x 2; J * G = I, so zeta'x(eps) = eps and v'x(eps) = 1
    const Eigen::VectorXd g1 = eq.G.col(0), g2 = eq.G.col(1);
    eq.A = 0.5 * g1.dot(m.U * g1);
    eq.B = g1.dot(m.U * g2);
    eq.C = 0.5 * g2.dot(m.U * g2);

    const double q = normal_quantile(alpha); // negative for alpha < 1/2
    eq.qa = 4.0 * eq.A * eq.A * q * q - 4.0 * eq.A;
    eq.qb = 4.0 * eq.A * eq.B * q * q - 4.0 * eq.B;
    eq.qc = eq.B * eq.B * q * q - 4.0 * eq.C;

    // q^2 A <= 1 makes the objective decrease without bound as eps grows.
    if (!(eq.qa > 0.0))
        throw NoStationaryPointError(
            "CFVaR has no minimum on the budget hyperplane at this alpha "
            "(q^2 A = " + std::to_string(q * q * eq.A) + " <= 1)");

    double disc = eq.qb * eq.qb - 4.0 * eq.qa * eq.qc;
    // Cauchy-Schwarz in the U inner product guarantees disc >= 0; absorb
    // rounding.
    const double disc_scale = eq.qb * eq.qb + 4.0 * std::abs(eq.qa * eq.qc);
    if (disc < 0.0 && disc > -1e-12 * disc_scale) disc = 0.0;

    PortfolioSolution s;
    s.objective = Objective::cfvar;
    s.alpha = alpha;
    s.diag.min_eig_U = f.min_eig;
    s.diag.cond_U = f.max_eig / f.min_eig;

    const auto objective_at = [&](double eps) {
        const Eigen::VectorXd x = eq.G * Eigen::Vector2d(eps, 1.0);
        return cfvar2(m, x, alpha);
    };

    double eps_star;
    bool have_star = false;
    if (disc >= 0.0) {
        // Numerically stable root pair of qa e^2 + qb e + qc = 0.
        const double root = std::sqrt(disc);
        const double shifted = -0.5 * (eq.qb + std::copysign(root, eq.qb));
        double r1, r2;
        if (shifted != 0.0) {
            r1 = shifted / eq.qa;
            r2 = eq.qc / shifted;
        } else {
            r1 = r2 = 0.0;
        }
        eq.eps_plus = std::max(r1, r2);
        eq.eps_minus = std::min(r1, r2);

        // A stationary point must satisfy 2 A eps + B > 0 (square-root branch
        // consistency); generically exactly one root does.
        const bool plus_ok = 2.0 * eq.A * eq.eps_plus + eq.B > 0.0;
        const bool minus_ok = 2.0 * eq.A * eq.eps_minus + eq.B > 0.0;
        if (plus_ok && !minus_ok) {
            eps_star = eq.eps_plus;
            have_star = true;
        } else if (minus_ok && !plus_ok) {
            eps_star = eq.eps_minus;
            have_star = true;
        } else if (plus_ok && minus_ok) {
            eps_star = objective_at(eq.eps_plus) <= objective_at(eq.eps_minus)
                           ? eq.eps_plus
                           : eq.eps_minus;
            have_star = true;
            s.diag.note = "both stationary candidates admissible; kept the minimizer";
        }
    } else {
        eq.eps_plus = eq.eps_minus = std::numeric_limits<double>::quiet_NaN();
    }

    if (!have_star) {
        // Defensive path: scan a wide bracket around the variance-minimizing
        // eps and refine.  An edge minimum means the objective keeps
        // improving outward, i.e. no interior stationary point exists.
        const double center = -eq.B / (2.0 * eq.A);
        const double span =
            1e3 * (std::abs(center) + std::sqrt(std::max(eq.C, 0.0) / eq.A) + 1e-12);
        const int grid = 2001;
        int best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid; ++i) {
            const double e = center - span + 2.0 * span * i / (grid - 1);
            const double val = objective_at(e);
            if (val < best_val) {
                best_val = val;
                best = i;
            }
        }
        if (best == 0 || best == grid - 1)
            throw NoStationaryPointError(
                "no admissible stationary point and the objective improves toward "
                "the scan boundary; CFVaR appears unbounded below");
        const double step = 2.0 * span / (grid - 1);
        const double lo = center - span + (best - 1) * step;
        eps_star = golden_min(objective_at, lo, lo + 2.0 * step);
        s.diag.fallback_used = true;
        s.diag.note = "closed-form root selection was ambiguous; used a scan";
    }

    eq.eps_star = eps_star;
    s.shares = eq.G * Eigen::Vector2d(eps_star, 1.0);
    s.eps = eq;
    fill_common(s, m, v);
    s.cfvar = cfvar2(m, s.shares, alpha);
    return s;
}

} // namespace optport
