#include "optport/gosset.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "optport/student_t.hpp"

namespace optport {

namespace {

void check_quadrature_config(const QuadratureConfig& cfg) {
    if (!(cfg.p_lo > 0.0) || !(cfg.p_hi < 1.0) || !(cfg.p_lo < cfg.p_hi))
        throw DomainError("truncation levels must satisfy 0 < p_lo < p_hi < 1");
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0))
        throw DomainError("quadrature tolerances must be positive");
    if (cfg.max_depth < 1) throw DomainError("quadrature max_depth must be >= 1");
}

// Adaptive Gauss-Kronrod on [a, b]; the result must carry an error estimate
// within max(abs_tol, rel_tol * |I|).
template <class F>
double integrate(const F& f, double a, double b, const QuadratureConfig& cfg) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, static_cast<unsigned>(cfg.max_depth), 0.1 * cfg.rel_tol, &err);
    if (!(err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))))
        throw QuadratureError("quadrature error estimate " + std::to_string(err) +
                              " exceeds tolerance on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    return value;
}

void check_contract(double S0, double sigma_ann, double strike, double expiry, double nu) {
    if (!(S0 > 0.0) || !std::isfinite(S0)) throw DomainError("spot must be positive");
    if (!(sigma_ann > 0.0) || !std::isfinite(sigma_ann))
        throw DomainError("volatility must be positive");
    if (!(strike > 0.0) || !std::isfinite(strike)) throw DomainError("strike must be positive");
    if (!(expiry > 0.0) || !std::isfinite(expiry)) throw DomainError("expiry must be positive");
    if (!(nu > 2.0) || !std::isfinite(nu))
        throw DomainError("tail index nu must exceed 2 to pin the return variance");
}

} // namespace

std::pair<double, double> truncation_points(double nu, const QuadratureConfig& cfg) {
    check_quadrature_config(cfg);
    return {t_quantile(cfg.p_lo, nu), t_quantile(cfg.p_hi, nu)};
}

double scaled_sigma(double sigma_ann, double expiry, double nu, SigmaConvention conv) {
    if (!(sigma_ann > 0.0) || !(expiry > 0.0))
        throw DomainError("volatility and expiry must be positive");
    const double raw = sigma_ann * std::sqrt(expiry);
    if (conv == SigmaConvention::raw) return raw;
    if (!(nu > 2.0))
        throw DomainError("standardized scaling needs nu > 2");
    return raw * std::sqrt((nu - 2.0) / nu);
}

double gosset_normalizer(double sigma_T, double nu, const QuadratureConfig& cfg) {
    if (!(sigma_T >= 0.0) || !std::isfinite(sigma_T))
        throw DomainError("sigma_T must be nonnegative");
    if (!(nu > 0.0)) throw DomainError("tail index nu must be positive");
    const auto [x_lo, x_hi] = truncation_points(nu, cfg);
    const double mass = cfg.p_hi - cfg.p_lo;
    const auto f = [=](double z) { return std::exp(sigma_T * z) * t_pdf(z, nu) / mass; };
    return integrate(f, x_lo, x_hi, cfg);
}

double gosset_price(OptionKind kind, double S0, double sigma_ann, double strike,
                    double expiry, double nu, double r, const QuadratureConfig& cfg,
                    SigmaConvention conv, Discounting disc) {
    check_contract(S0, sigma_ann, strike, expiry, nu);
    check_quadrature_config(cfg);

    const double sigma_T = scaled_sigma(sigma_ann, expiry, nu, conv);
    const auto [x_lo, x_hi] = truncation_points(nu, cfg);
    const double mass = cfg.p_hi - cfg.p_lo;
    const double Z = gosset_normalizer(sigma_T, nu, cfg);
    const double A = S0 * std::exp(r * expiry) / Z;
    const double t0 = std::log(strike / A) / sigma_T;

    double value = 0.0;
    if (kind == OptionKind::call) {
        if (t0 <= x_lo)
            throw TruncationError(
                "call exercise boundary lies at or below the lower truncation point; "
                "widen the truncation (smaller p_lo) to price this contract");
        if (t0 < x_hi) {
            const auto f = [=](double z) {
                return (A * std::exp(sigma_T * z) - strike) * t_pdf(z, nu) / mass;
            };
            value = integrate(f, t0, x_hi, cfg);
        }
    } else {
        if (t0 >= x_hi)
            throw TruncationError(
                "put exercise boundary lies at or above the upper truncation point; "
                "widen the truncation (larger p_hi) to price this contract");
        if (t0 > x_lo) {
            const auto f = [=](double z) {
                return (strike - A * std::exp(sigma_T * z)) * t_pdf(z, nu) / mass;
            };
            value = integrate(f, x_lo, t0, cfg);
        }
    }
    if (disc == Discounting::present_value) value *= std::exp(-r * expiry);
    return value;
}

GreekSet gosset_greeks(const MarketModel& m, const OptionSpec& opt,
                       const QuadratureConfig& cfg, const BumpConfig& bump,
                       SigmaConvention conv, Discounting disc) {
    const Eigen::Index n = m.size();
    if (opt.underlying < 0 || opt.underlying >= n)
        throw DimensionError("option underlying index out of range");
    if (!(bump.h_spot_rel > 0.0) || !(bump.h_time > 0.0))
        throw DomainError("finite-difference steps must be positive");

    const double S0 = m.spot[opt.underlying];
    const double sigma = m.sigma_ann[opt.underlying];
    const auto value = [&](double S, double T) {
        return gosset_price(opt.kind, S, sigma, opt.strike, T, m.nu, m.r, cfg, conv, disc);
    };

    const double base = value(S0, opt.expiry);

    const double h = bump.h_spot_rel * S0;
    if (opt.expiry <= bump.h_time)
        throw StepError("time bump exceeds the option's remaining life");
    double up, down, aged;
    try {
        up = value(S0 + h, opt.expiry);
        down = value(S0 - h, opt.expiry);
        aged = value(S0, opt.expiry - bump.h_time);
    } catch (const TruncationError& e) {
        throw StepError(std::string("finite-difference bump crossed the truncated support: ") +
                        e.what());
    }

    GreekSet g;
    g.price = base;
    g.theta = (aged - base) / bump.h_time;
    g.delta = Eigen::VectorXd::Zero(n);
    g.gamma = Eigen::MatrixXd::Zero(n, n);
    g.delta[opt.underlying] = (up - down) / (2.0 * h);
    g.gamma(opt.underlying, opt.underlying) = (up - 2.0 * base + down) / (h * h);
    return g;
}

} // namespace optport
