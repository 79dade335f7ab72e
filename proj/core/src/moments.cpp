#include "optport/moments.hpp"

#include <cmath>

#include "optport/student_t.hpp"

namespace optport {

MomentModel build_moment_model(const std::vector<GreekSet>& book,
                               const Eigen::VectorXd& mu,
                               const Eigen::MatrixXd& Sigma, double nu, double dt) {
    const auto M = static_cast<Eigen::Index>(book.size());
    const Eigen::Index N = mu.size();
    if (M < 1) throw DimensionError("book must contain at least one position");
    if (N < 1) throw DimensionError("model must contain at least one stock");
    if (Sigma.rows() != N || Sigma.cols() != N)
        throw DimensionError("Sigma must be N x N with N = mu.size()");
    for (const auto& g : book) {
        if (g.delta.size() != N || g.gamma.rows() != N || g.gamma.cols() != N)
            throw DimensionError("every position must carry an N-vector delta and N x N gamma");
    }
    if (!(nu > 4.0))
        throw NuError("variance of the quadratic P&L needs nu > 4, got nu = " +
                      std::to_string(nu));
    if (!(dt > 0.0)) throw DomainError("horizon dt must be positive");

    MomentModel m;
    m.nu = nu;
    m.dt = dt;
    m.theta.resize(M);
    m.p.resize(M);
    m.xi.resize(M);
    m.D.resize(N, M);
    m.B.resize(M, N);
    m.R.resize(M, M);

    std::vector<Eigen::MatrixXd> gs(static_cast<std::size_t>(M)); // Gamma_m Sigma
    for (Eigen::Index k = 0; k < M; ++k) {
        const auto& g = book[static_cast<std::size_t>(k)];
        m.theta[k] = g.theta;
        m.D.col(k) = g.delta;
        m.B.row(k) = (g.gamma * mu).transpose();
        gs[static_cast<std::size_t>(k)] = g.gamma * Sigma;
        m.p[k] = gs[static_cast<std::size_t>(k)].trace();
        m.xi[k] = 0.5 * mu.dot(g.gamma * mu);
    }
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = i; j < M; ++j) {
            const double r = (gs[static_cast<std::size_t>(i)].cwiseProduct(
                                  gs[static_cast<std::size_t>(j)].transpose()))
                                 .sum();
            m.R(i, j) = r;
            m.R(j, i) = r;
        }

    m.zeta = dt * m.theta + m.D.transpose() * mu + nu / (2.0 * (nu - 2.0)) * m.p + m.xi;

    const double c1 = 2.0 * nu / (nu - 2.0);
    const double c2 = nu * nu / ((nu - 2.0) * (nu - 4.0));
    const double cp = 0.5 * (c2 - std::pow(nu / (nu - 2.0), 2));
    const Eigen::MatrixXd DB = m.D.transpose() + m.B; // M x N
    Eigen::MatrixXd U = c1 * DB * Sigma * DB.transpose() + c2 * m.R +
                        cp * m.p * m.p.transpose();
    m.U = 0.5 * (U + U.transpose());
    return m;
}

double portfolio_mean(const MomentModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.zeta.size())
        throw DimensionError("share vector size must match the number of positions");
    return m.zeta.dot(x);
}

double portfolio_variance(const MomentModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.zeta.size())
        throw DimensionError("share vector size must match the number of positions");
    return std::max(0.0, 0.5 * x.dot(m.U * x));
}

double cfvar2(const MomentModel& m, const Eigen::VectorXd& x, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 0.5))
        throw AlphaError("alpha must lie strictly inside (0, 1/2)");
    return -portfolio_mean(m, x) -
           normal_quantile(alpha) * std::sqrt(portfolio_variance(m, x));
}

} // namespace optport
