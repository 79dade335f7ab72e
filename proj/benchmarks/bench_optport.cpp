// Hot-path throughput: pricing, greeks, moment assembly, the two closed-form
// solvers and the multivariate t sampler, all on the bundled five-stock
// dataset so the numbers track what the command-line tool actually does.

#include <benchmark/benchmark.h>

#include <optport/gosset.hpp>
#include <optport/market_data.hpp>
#include <optport/moments.hpp>
#include <optport/optimize.hpp>
#include <optport/student_t.hpp>

using namespace optport;

namespace {

const MarketModel& market() {
    static const MarketModel m =
        load_market(std::string(OPTPORT_DATA_DIR) + "/hu2010.json");
    return m;
}

std::vector<GreekSet> atm_call_book() {
    const MarketModel& m = market();
    std::vector<GreekSet> book;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        OptionSpec s;
        s.underlying = static_cast<int>(i);
        s.strike = m.spot[i];
        book.push_back(gosset_greeks(m, s));
    }
    return book;
}

void bm_gosset_price(benchmark::State& state) {
    const MarketModel& m = market();
    for (auto _ : state) {
        benchmark::DoNotOptimize(gosset_price(OptionKind::call, m.spot[0],
                                              m.sigma_ann[0], m.spot[0], 1.0, m.nu,
                                              m.r));
    }
}
BENCHMARK(bm_gosset_price);

void bm_gosset_greeks(benchmark::State& state) {
    const MarketModel& m = market();
    OptionSpec s;
    s.strike = m.spot[0];
    for (auto _ : state) benchmark::DoNotOptimize(gosset_greeks(m, s));
}
BENCHMARK(bm_gosset_greeks);

void bm_build_moment_model(benchmark::State& state) {
    const MarketModel& m = market();
    const auto book = atm_call_book();
    const Eigen::VectorXd mu = build_drift(m);
    const Eigen::MatrixXd Sigma = build_covariance(m);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_moment_model(book, mu, Sigma, m.nu, m.dt));
}
BENCHMARK(bm_build_moment_model);

void bm_solve_min_variance(benchmark::State& state) {
    const MarketModel& m = market();
    const auto book = atm_call_book();
    const MomentModel mm =
        build_moment_model(book, build_drift(m), build_covariance(m), m.nu, m.dt);
    Eigen::VectorXd v(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) v[i] = book[i].price;
    for (auto _ : state) benchmark::DoNotOptimize(solve_min_variance(mm, v));
}
BENCHMARK(bm_solve_min_variance);

void bm_solve_min_cfvar(benchmark::State& state) {
    const MarketModel& m = market();
    const auto book = atm_call_book();
    const MomentModel mm =
        build_moment_model(book, build_drift(m), build_covariance(m), m.nu, m.dt);
    Eigen::VectorXd v(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) v[i] = book[i].price;
    for (auto _ : state) benchmark::DoNotOptimize(solve_min_cfvar(mm, v, 0.01));
}
BENCHMARK(bm_solve_min_cfvar);

void bm_mvt_draw(benchmark::State& state) {
    const MarketModel& m = market();
    TParams p;
    p.nu = m.nu;
    p.mu = build_drift(m);
    p.scale = build_covariance(m) * ((m.nu - 2.0) / m.nu);
    MvtSampler s(p, 42);
    Eigen::VectorXd out(s.dim());
    for (auto _ : state) {
        s.draw(out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_mvt_draw);

} // namespace

BENCHMARK_MAIN();
