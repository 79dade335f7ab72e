#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <optport/market_data.hpp>
#include <optport/moments.hpp>
#include <optport/oracle.hpp>

using namespace optport;

namespace {

const std::string kDataDir = OPTPORT_DATA_DIR;

GreekSet position(double theta, const Eigen::VectorXd& delta,
                  const Eigen::MatrixXd& gamma) {
    GreekSet g;
    g.theta = theta;
    g.delta = delta;
    g.gamma = gamma;
    return g;
}

std::vector<GreekSet> atm_call_book(const MarketModel& m) {
    std::vector<GreekSet> book;
    for (int i = 0; i < m.size(); ++i) {
        OptionSpec o;
        o.underlying = i;
        o.kind = OptionKind::call;
        o.strike = m.spot[i];
        o.expiry = 1.0;
        book.push_back(gosset_greeks(m, o));
    }
    return book;
}

} // namespace

TEST_CASE("scalar delta-only position reduces to the linear model") {
    const double d = 0.7, mu = 0.02, Sigma = 1.3, nu = 6.5, dt = 0.01, th = -0.4;
    const auto book = std::vector<GreekSet>{
        position(th, Eigen::VectorXd::Constant(1, d), Eigen::MatrixXd::Zero(1, 1))};
    const MomentModel mm =
        build_moment_model(book, Eigen::VectorXd::Constant(1, mu),
                           Eigen::MatrixXd::Constant(1, 1, Sigma), nu, dt);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 2.0);
    CHECK(portfolio_mean(mm, x) == doctest::Approx(2.0 * (dt * th + d * mu)).epsilon(1e-14));
    // Var(d Y) with Y ~ t(0, Sigma, nu): d^2 * nu/(nu-2) * Sigma
    CHECK(portfolio_variance(mm, x) ==
          doctest::Approx(4.0 * d * d * nu / (nu - 2.0) * Sigma).epsilon(1e-13));
}

TEST_CASE("scalar gamma-only position matches Var(0.5 gamma Y^2) exactly") {
    // This identity pins the R and p p' coefficients of U: the second moment
    // of Y^2 under a t distribution is 3 nu^2 / ((nu-2)(nu-4)) Sigma^2.
    const double ga = 0.7, Sigma = 2.0, nu = 5.87, dt = 1.0;
    const auto book = std::vector<GreekSet>{position(
        0.0, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, ga))};
    const MomentModel mm = build_moment_model(book, Eigen::VectorXd::Zero(1),
                                              Eigen::MatrixXd::Constant(1, 1, Sigma),
                                              nu, dt);
    const double c = nu * nu / ((nu - 2.0) * (nu - 4.0));
    const double k = nu / (nu - 2.0);
    const double want_var = 0.25 * ga * ga * Sigma * Sigma * (3.0 * c - k * k);
    const double want_mean = 0.5 * ga * k * Sigma;
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    CHECK(portfolio_mean(mm, x) == doctest::Approx(want_mean).epsilon(1e-13));
    CHECK(portfolio_variance(mm, x) == doctest::Approx(want_var).epsilon(1e-12));
}

TEST_CASE("gaussian limit recovers the classic delta-gamma variance") {
    const double nu = 1e7, dt = 1.0;
    const Eigen::MatrixXd Sigma =
        Eigen::Matrix2d{{1.5, 0.3}, {0.3, 0.8}};
    const Eigen::MatrixXd Gamma =
        Eigen::Matrix2d{{0.6, -0.2}, {-0.2, 1.1}};
    const Eigen::VectorXd delta = Eigen::Vector2d(0.9, -0.4);
    const auto book = std::vector<GreekSet>{position(0.0, delta, Gamma)};
    const MomentModel mm =
        build_moment_model(book, Eigen::VectorXd::Zero(2), Sigma, nu, dt);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    const double classic =
        delta.dot(Sigma * delta) + 0.5 * (Gamma * Sigma * Gamma * Sigma).trace();
    CHECK(portfolio_variance(mm, x) == doctest::Approx(classic).epsilon(1e-5));
}

TEST_CASE("drift moves the mean but not the covariance of a linear book") {
    const Eigen::MatrixXd Sigma = Eigen::Matrix2d{{1.0, 0.2}, {0.2, 0.5}};
    const auto book = std::vector<GreekSet>{
        position(0.1, Eigen::Vector2d(1.0, 0.0), Eigen::MatrixXd::Zero(2, 2)),
        position(-0.2, Eigen::Vector2d(0.3, 0.7), Eigen::MatrixXd::Zero(2, 2))};
    const MomentModel a =
        build_moment_model(book, Eigen::Vector2d(0.0, 0.0), Sigma, 6.0, 0.01);
    const MomentModel b =
        build_moment_model(book, Eigen::Vector2d(0.5, -0.3), Sigma, 6.0, 0.01);
    CHECK((a.U - b.U).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.zeta[0] != b.zeta[0]);
}

TEST_CASE("U is positive semidefinite for random books") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const int N = 3, M = 4;
        Eigen::MatrixXd root(N, N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) root(i, j) = gauss(rng);
        const Eigen::MatrixXd Sigma =
            root * root.transpose() + 0.1 * Eigen::MatrixXd::Identity(N, N);
        Eigen::VectorXd mu(N);
        for (int i = 0; i < N; ++i) mu[i] = 0.3 * gauss(rng);

        std::vector<GreekSet> book;
        for (int m = 0; m < M; ++m) {
            Eigen::VectorXd d(N);
            for (int i = 0; i < N; ++i) d[i] = gauss(rng);
            Eigen::MatrixXd g(N, N);
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) g(i, j) = gauss(rng);
            const Eigen::MatrixXd gsym = 0.5 * (g + g.transpose());
            book.push_back(position(gauss(rng), d, gsym));
        }
        const MomentModel mm = build_moment_model(book, mu, Sigma, 6.2, 0.02);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mm.U, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > -1e-10 * mm.U.norm());
        CHECK((mm.U - mm.U.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("mean is linear and variance quadratic in the shares") {
    const Eigen::MatrixXd Sigma = Eigen::Matrix2d{{1.0, 0.2}, {0.2, 0.5}};
    const auto book = std::vector<GreekSet>{
        position(0.1, Eigen::Vector2d(1.0, -0.5), Eigen::Matrix2d{{0.2, 0.0}, {0.0, 0.1}}),
        position(0.3, Eigen::Vector2d(0.2, 0.9), Eigen::Matrix2d{{0.0, 0.1}, {0.1, 0.4}})};
    const MomentModel mm =
        build_moment_model(book, Eigen::Vector2d(0.05, -0.02), Sigma, 7.0, 0.01);
    const Eigen::VectorXd x = Eigen::Vector2d(1.5, -2.0);
    CHECK(portfolio_mean(mm, 3.0 * x) ==
          doctest::Approx(3.0 * portfolio_mean(mm, x)).epsilon(1e-13));
    CHECK(portfolio_variance(mm, 3.0 * x) ==
          doctest::Approx(9.0 * portfolio_variance(mm, x)).epsilon(1e-13));
    CHECK(portfolio_variance(mm, x) >= 0.0);
}

TEST_CASE("cfvar2 anchors") {
    // Construct a model with zero mean and unit variance for x = (1).
    MomentModel mm;
    mm.zeta = Eigen::VectorXd::Zero(1);
    mm.U = Eigen::MatrixXd::Constant(1, 1, 2.0); // variance 0.5 * 2 = 1
    mm.nu = 6.0;
    mm.dt = 1.0;
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    CHECK(cfvar2(mm, x, 0.01) == doctest::Approx(2.3263478740408408).epsilon(1e-10));
    CHECK(cfvar2(mm, x, 0.001) == doctest::Approx(3.090232306167813).epsilon(1e-10));
    // smaller alpha means a wider tail bound
    CHECK(cfvar2(mm, x, 0.001) > cfvar2(mm, x, 0.01));

    mm.zeta[0] = 0.4; // positive expected P&L shifts the bound down
    CHECK(cfvar2(mm, x, 0.01) ==
          doctest::Approx(-0.4 + 2.3263478740408408).epsilon(1e-10));

    CHECK_THROWS_AS(cfvar2(mm, x, 0.5), AlphaError);
    CHECK_THROWS_AS(cfvar2(mm, x, 0.0), AlphaError);
    CHECK_THROWS_AS(cfvar2(mm, x, -0.1), AlphaError);
}

TEST_CASE("input validation") {
    const auto book = std::vector<GreekSet>{position(
        0.0, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1))};
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(1);
    const Eigen::MatrixXd Sigma = Eigen::MatrixXd::Identity(1, 1);
    CHECK_THROWS_AS(build_moment_model(book, mu, Sigma, 4.0, 0.01), NuError);
    CHECK_THROWS_AS(build_moment_model(book, mu, Sigma, 3.0, 0.01), NuError);
    CHECK_NOTHROW(build_moment_model(book, mu, Sigma, 4.1, 0.01));
    CHECK_THROWS_AS(build_moment_model(book, mu, Sigma, 6.0, 0.0), DomainError);
    CHECK_THROWS_AS(build_moment_model({}, mu, Sigma, 6.0, 0.01), DimensionError);
    CHECK_THROWS_AS(
        build_moment_model(book, Eigen::VectorXd::Zero(2), Sigma, 6.0, 0.01),
        DimensionError);

    const MomentModel mm = build_moment_model(book, mu, Sigma, 6.0, 0.01);
    CHECK_THROWS_AS(portfolio_mean(mm, Eigen::VectorXd::Zero(2)), DimensionError);
}

TEST_CASE("bundled book: analytic moments agree with simulation") {
    const MarketModel m = load_market(kDataDir + "/hu2010.json");
    const auto book = atm_call_book(m);
    const Eigen::MatrixXd Sigma = build_covariance(m);
    const Eigen::VectorXd mu = build_drift(m);
    const MomentModel mm = build_moment_model(book, mu, Sigma, m.nu, m.dt);

    const Eigen::VectorXd x = Eigen::VectorXd::Ones(5);
    // sanity anchors for the equal-shares portfolio
    CHECK(portfolio_mean(mm, x) == doctest::Approx(0.02873069).epsilon(1e-3));
    CHECK(portfolio_variance(mm, x) == doctest::Approx(1.85634096).epsilon(1e-3));

    const MomentCheck chk = mc_moments(book, mu, Sigma, m.nu, m.dt, x, mm,
                                       1'000'000, 4242);
    CHECK(chk.mean.passed);
    CHECK(chk.variance.passed);
    // the bands themselves must be sane
    CHECK(chk.mean.se > 0.0);
    CHECK(chk.variance.se > 0.0);
    CHECK(chk.variance.se < 0.05);
}
