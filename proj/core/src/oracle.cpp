#include "optport/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "optport/student_t.hpp"

namespace optport {

namespace {

double sample_sd(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (v.size() - 1));
}

VerificationReport make_report(std::string quantity, double analytic, double estimate,
                               double se, double k_se, std::uint64_t seed,
                               std::size_t samples) {
    VerificationReport r;
    r.quantity = std::move(quantity);
    r.analytic = analytic;
    r.estimate = estimate;
    r.se = se;
    r.tolerance = k_se * se;
    r.passed = std::abs(analytic - estimate) <= r.tolerance;
    r.seed = seed;
    r.samples = samples;
    return r;
}

struct NmResult {
    Eigen::VectorXd y;
    double value = 0.0;
    bool converged = false;
};

// Nelder-Mead with standard reflection/expansion/contraction/shrink
// coefficients; convergence on both simplex value spread and diameter.
template <class F>
NmResult nelder_mead(const F& f, const Eigen::VectorXd& y0, double step, int max_iter) {
    const Eigen::Index d = y0.size();
    std::vector<Eigen::VectorXd> ys(static_cast<std::size_t>(d) + 1, y0);
    std::vector<double> fs(static_cast<std::size_t>(d) + 1);
    for (Eigen::Index i = 0; i < d; ++i)
        ys[static_cast<std::size_t>(i) + 1][i] += step * (1.0 + std::abs(y0[i]));
    for (std::size_t i = 0; i < ys.size(); ++i) fs[i] = f(ys[i]);

    std::vector<std::size_t> order(ys.size());
    NmResult res;
    for (int it = 0; it < max_iter; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        double diam = 0.0;
        for (std::size_t i = 0; i < ys.size(); ++i)
            diam = std::max(diam, (ys[i] - ys[best]).cwiseAbs().maxCoeff());
        if (std::abs(fs[worst] - fs[best]) <= 1e-13 * (1.0 + std::abs(fs[best])) &&
            diam <= 1e-9 * (1.0 + ys[best].cwiseAbs().maxCoeff())) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (i != worst) centroid += ys[i];
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd refl = centroid + (centroid - ys[worst]);
        const double f_refl = f(refl);
        if (f_refl < fs[best]) {
            const Eigen::VectorXd expa = centroid + 2.0 * (centroid - ys[worst]);
            const double f_expa = f(expa);
            if (f_expa < f_refl) {
                ys[worst] = expa; fs[worst] = f_expa;
            } else {
                ys[worst] = refl; fs[worst] = f_refl;
            }
        } else if (f_refl < fs[second_worst]) {
            ys[worst] = refl; fs[worst] = f_refl;
        } else {
            const Eigen::VectorXd contr = centroid + 0.5 * (ys[worst] - centroid);
            const double f_contr = f(contr);
            if (f_contr < fs[worst]) {
                ys[worst] = contr; fs[worst] = f_contr;
            } else {
                for (std::size_t i = 0; i < ys.size(); ++i) {
                    if (i == best) continue;
                    ys[i] = ys[best] + 0.5 * (ys[i] - ys[best]);
                    fs[i] = f(ys[i]);
                }
            }
        }
    }
    const auto best_it = std::min_element(fs.begin(), fs.end());
    res.y = ys[static_cast<std::size_t>(best_it - fs.begin())];
    res.value = *best_it;
    return res;
}

} // namespace

MomentCheck mc_moments(const std::vector<GreekSet>& book, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& Sigma, double nu, double dt,
                       const Eigen::VectorXd& x, const MomentModel& analytic,
                       std::size_t n, std::uint64_t seed, double k_se) {
    constexpr std::size_t kBatches = 200;
    if (n < 10 * kBatches)
        throw InsufficientSamplesError("moment verification needs at least 2000 samples");
    if (x.size() != static_cast<Eigen::Index>(book.size()))
        throw DimensionError("share vector size must match the book");

    const Eigen::Index N = mu.size();
    double theta_x = 0.0;
    Eigen::VectorXd d_x = Eigen::VectorXd::Zero(N);
    Eigen::MatrixXd G_x = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t k = 0; k < book.size(); ++k) {
        theta_x += x[static_cast<Eigen::Index>(k)] * book[k].theta;
        d_x += x[static_cast<Eigen::Index>(k)] * book[k].delta;
        G_x += x[static_cast<Eigen::Index>(k)] * book[k].gamma;
    }
    const double drift = dt * theta_x;

    MvtSampler sampler({nu, mu, Sigma}, seed);
    Eigen::VectorXd ds(N);

    std::vector<double> bs1(kBatches, 0.0), bs2(kBatches, 0.0);
    std::vector<std::size_t> bn(kBatches, 0);
    const std::size_t base = n / kBatches, extra = n % kBatches;
    for (std::size_t b = 0; b < kBatches; ++b) {
        const std::size_t nb = base + (b < extra ? 1 : 0);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < nb; ++i) {
            sampler.draw(ds);
            const double dv = drift + d_x.dot(ds) + 0.5 * ds.dot(G_x * ds);
            s1 += dv;
            s2 += dv * dv;
        }
        bs1[b] = s1;
        bs2[b] = s2;
        bn[b] = nb;
    }
    const double S1 = std::accumulate(bs1.begin(), bs1.end(), 0.0);
    const double S2 = std::accumulate(bs2.begin(), bs2.end(), 0.0);
    const auto nd = static_cast<double>(n);
    const double mean_hat = S1 / nd;
    const double var_hat = (S2 - nd * mean_hat * mean_hat) / (nd - 1.0);

    // Delete-one-batch jackknife of both estimators.
    std::vector<double> jk_mean(kBatches), jk_var(kBatches);
    for (std::size_t b = 0; b < kBatches; ++b) {
        const double n1 = nd - static_cast<double>(bn[b]);
        const double m1 = (S1 - bs1[b]) / n1;
        jk_mean[b] = m1;
        jk_var[b] = (S2 - bs2[b]) / n1 - m1 * m1;
    }
    const auto jackknife_se = [&](const std::vector<double>& leave_one) {
        const double mean =
            std::accumulate(leave_one.begin(), leave_one.end(), 0.0) / kBatches;
        double acc = 0.0;
        for (double v : leave_one) acc += (v - mean) * (v - mean);
        return std::sqrt(acc * (kBatches - 1.0) / kBatches);
    };
    const double se_mean_jk = jackknife_se(jk_mean);
    const double se_var_jk = jackknife_se(jk_var);

    // Batch bootstrap of the variance, seeded deterministically off `seed`.
    std::mt19937_64 brng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<std::size_t> pick(0, kBatches - 1);
    constexpr int kBoot = 500;
    std::vector<double> boot_var(kBoot);
    for (int rep = 0; rep < kBoot; ++rep) {
        double r1 = 0.0, r2 = 0.0, rn = 0.0;
        for (std::size_t b = 0; b < kBatches; ++b) {
            const std::size_t j = pick(brng);
            r1 += bs1[j];
            r2 += bs2[j];
            rn += static_cast<double>(bn[j]);
        }
        const double m = r1 / rn;
        boot_var[rep] = r2 / rn - m * m;
    }
    const double se_var_boot = sample_sd(boot_var);

    const double se_mean = std::max(std::sqrt(var_hat / nd), se_mean_jk);
    const double se_var = std::max(se_var_jk, se_var_boot);

    MomentCheck out;
    out.mean = make_report("mean", portfolio_mean(analytic, x), mean_hat, se_mean, k_se,
                           seed, n);
    out.variance = make_report("variance", portfolio_variance(analytic, x), var_hat,
                               se_var, k_se, seed, n);
    return out;
}

double empirical_var(const std::vector<double>& pnl, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw AlphaError("alpha must lie strictly inside (0, 1)");
    const double n = static_cast<double>(pnl.size());
    if (n * alpha < 10.0)
        throw InsufficientSamplesError("empirical VaR needs at least 10/alpha samples");
    std::vector<double> sorted(pnl);
    std::sort(sorted.begin(), sorted.end());
    const auto idx = static_cast<std::size_t>(std::floor(alpha * (n - 1.0)));
    return -sorted[idx];
}

BruteForceResult brute_force_optimum(Objective obj, const MomentModel& m,
                                     const Eigen::VectorXd& v, double alpha,
                                     std::uint64_t seed, int restarts) {
    if (v.size() != m.positions())
        throw DimensionError("price vector size must match the number of positions");
    if (v.isZero(0.0)) throw ZeroPriceError("price vector is identically zero");

    const Eigen::Index M = v.size();
    const Eigen::VectorXd x0 = v / v.squaredNorm(); // feasible anchor, v'x0 = 1
    const auto objective = [&](const Eigen::VectorXd& x) {
        return obj == Objective::variance ? portfolio_variance(m, x)
                                          : cfvar2(m, x, alpha);
    };

    BruteForceResult res;
    if (M == 1) {
        res.shares = x0;
        res.value = objective(x0);
        res.converged = true;
        return res;
    }

    // Orthonormal basis of the hyperplane v'y = 0 from a Householder QR of v.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
    const Eigen::MatrixXd Qfull = qr.householderQ();
    const Eigen::MatrixXd basis = Qfull.rightCols(M - 1);
    const auto reduced = [&](const Eigen::VectorXd& y) {
        return objective(x0 + basis * y);
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double spread = 3.0 * x0.norm();

    NmResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (int s = 0; s < restarts; ++s) {
        Eigen::VectorXd y0 = Eigen::VectorXd::Zero(M - 1);
        if (s > 0)
            for (Eigen::Index i = 0; i < M - 1; ++i) y0[i] = spread * unif(rng);
        const NmResult r = nelder_mead(reduced, y0, 0.25 * (x0.norm() + 1e-3), 5000);
        if (r.value < best.value) best = r;
    }
    const NmResult polished = nelder_mead(reduced, best.y, 1e-4 * (x0.norm() + 1e-3), 5000);
    if (polished.value <= best.value) best = polished;

    res.shares = x0 + basis * best.y;
    res.value = best.value;
    res.converged = polished.converged;
    return res;
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol, int max_iter) {
    if (!(hi > lo)) throw DomainError("golden_minimize needs lo < hi");
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
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

double black_scholes(OptionKind kind, double S0, double sigma, double strike,
                     double expiry, double r, Discounting disc) {
    if (!(S0 > 0.0) || !(strike > 0.0))
        throw DomainError("spot and strike must be positive");
    if (sigma < 0.0 || expiry < 0.0)
        throw DomainError("volatility and expiry must be nonnegative");

    const double fwd = S0 * std::exp(r * expiry);
    const double sd = sigma * std::sqrt(expiry);
    double call_fwd;
    if (sd == 0.0) {
        call_fwd = std::max(fwd - strike, 0.0);
    } else {
        const double d1 = (std::log(fwd / strike) + 0.5 * sd * sd) / sd;
        const double d2 = d1 - sd;
        call_fwd = fwd * normal_cdf(d1) - strike * normal_cdf(d2);
    }
    double value = kind == OptionKind::call ? call_fwd : call_fwd - (fwd - strike);
    if (disc == Discounting::present_value) value *= std::exp(-r * expiry);
    return value;
}

} // namespace optport
