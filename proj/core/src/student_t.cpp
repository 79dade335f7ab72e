#include "optport/student_t.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include <boost/math/special_functions/beta.hpp>

namespace optport {

namespace {

void require_nu(double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw DomainError("tail index nu must be positive and finite");
}

void require_finite(double z, const char* what) {
    if (!std::isfinite(z)) throw DomainError(std::string(what) + " must be finite");
}

void require_prob(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw DomainError("probability must lie strictly inside (0, 1)");
}

// Bracketing bisection for a continuous strictly increasing CDF.  Expands the
// bracket geometrically until it straddles p, then bisects to machine width.
template <class Cdf>
double inverse_cdf(const Cdf& cdf, double p) {
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 1100 && cdf(lo) > p; ++i) lo *= 2.0;
    for (int i = 0; i < 1100 && cdf(hi) < p; ++i) hi *= 2.0;
    if (cdf(lo) > p || cdf(hi) < p)
        throw NonConvergenceError("inverse CDF bracketing failed");
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // interval at machine resolution
        if (cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double t_pdf(double z, double nu) {
    require_nu(nu);
    require_finite(z, "z");
    const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                            0.5 * std::log(nu * M_PI);
    return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu));
}

double t_cdf(double z, double nu) {
    require_nu(nu);
    require_finite(z, "z");
    // I_x(nu/2, 1/2) with x = nu/(nu + z^2) is twice the tail probability.
    const double x = nu / (nu + z * z);
    const double tail = 0.5 * boost::math::ibeta(0.5 * nu, 0.5, x);
    return z <= 0.0 ? tail : 1.0 - tail;
}

double t_quantile(double p, double nu) {
    require_nu(nu);
    require_prob(p);
    if (p == 0.5) return 0.0;
    return inverse_cdf([nu](double z) { return t_cdf(z, nu); }, p);
}

double normal_pdf(double z) {
    require_finite(z, "z");
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double normal_cdf(double z) {
    require_finite(z, "z");
    return 0.5 * std::erfc(-z / M_SQRT2);
}

double normal_quantile(double p) {
    require_prob(p);
    if (p == 0.5) return 0.0;
    return inverse_cdf([](double z) { return normal_cdf(z); }, p);
}

MvtSampler::MvtSampler(TParams params, std::uint64_t seed)
    : params_(std::move(params)), rng_(seed) {
    require_nu(params_.nu);
    const Eigen::Index n = params_.mu.size();
    if (n == 0) throw DimensionError("multivariate t needs dimension >= 1");
    if (params_.scale.rows() != n || params_.scale.cols() != n)
        throw DimensionError("scale matrix dimensions must match mu");
    Eigen::LLT<Eigen::MatrixXd> llt(params_.scale);
    if (llt.info() != Eigen::Success)
        throw CholeskyError("scale matrix is not positive definite");
    chol_ = llt.matrixL();
    z_.resize(n);
}

double MvtSampler::next_uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double MvtSampler::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - next_uniform(); // in (0, 1], keeps the log finite
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

// Marsaglia & Tsang (2000), "A simple method for generating gamma variables".
double MvtSampler::next_gamma(double a) {
    if (a < 1.0) {
        double u = next_uniform();
        while (u == 0.0) u = next_uniform();
        return next_gamma(a + 1.0) * std::pow(u, 1.0 / a);
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

void MvtSampler::draw(Eigen::Ref<Eigen::VectorXd> out) {
    if (out.size() != dim()) throw DimensionError("output size must match sampler dimension");
    for (Eigen::Index i = 0; i < z_.size(); ++i) z_[i] = next_normal();
    const double w = 2.0 * next_gamma(0.5 * params_.nu); // chi^2_nu
    out = params_.mu + (chol_ * z_) * std::sqrt(params_.nu / w);
}

Eigen::VectorXd MvtSampler::draw() {
    Eigen::VectorXd out(dim());
    draw(out);
    return out;
}

Eigen::MatrixXd sample_mvt(const TParams& params, std::size_t n, std::uint64_t seed) {
    MvtSampler sampler(params, seed);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), sampler.dim());
    Eigen::VectorXd row(sampler.dim());
    for (std::size_t i = 0; i < n; ++i) {
        sampler.draw(row);
        out.row(static_cast<Eigen::Index>(i)) = row;
    }
    return out;
}

} // namespace optport
