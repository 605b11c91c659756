#include <benchmark/benchmark.h>

#include "dyncon/covariance.hpp"
#include "dyncon/single_solver.hpp"
#include "dyncon/synthdata.hpp"

namespace {

dyncon::SubjectSession make_session(int n, int p) {
    auto truth = dyncon::generate_piecewise_network(p, {n}, p, 7);
    return dyncon::sample_timeseries(truth, 11);
}

void BM_covariance_serial(benchmark::State& state) {
    const auto session = make_session(static_cast<int>(state.range(0)),
                                      static_cast<int>(state.range(1)));
    for (auto _ : state) {
        auto cov = dyncon::serial::kernel_weighted_covariances(session, 8.0);
        benchmark::DoNotOptimize(cov);
    }
}

void BM_covariance_openmp(benchmark::State& state) {
    const auto session = make_session(static_cast<int>(state.range(0)),
                                      static_cast<int>(state.range(1)));
    for (auto _ : state) {
        auto cov = dyncon::kernel_weighted_covariances(session, 8.0);
        benchmark::DoNotOptimize(cov);
    }
}

struct AdmmState {
    dyncon::CovarianceSequence cov;
    std::vector<dyncon::Matrix> theta, z, u;
};

AdmmState make_admm_state(int n, int p) {
    AdmmState s;
    s.cov = dyncon::kernel_weighted_covariances(make_session(n, p), 8.0);
    s.theta.assign(n, dyncon::Matrix::Identity(p, p));
    s.z.assign(n, dyncon::Matrix::Identity(p, p));
    s.u.assign(n, dyncon::Matrix::Zero(p, p));
    return s;
}

void BM_admm_iteration_serial(benchmark::State& state) {
    auto s = make_admm_state(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        dyncon::serial::theta_update(s.cov, s.z, s.u, 1.0, s.theta);
        dyncon::serial::z_update(s.theta, s.u, 1.0, 0.1, 0.1, false, s.z);
        benchmark::DoNotOptimize(s.z);
    }
}

void BM_admm_iteration_openmp(benchmark::State& state) {
    auto s = make_admm_state(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        dyncon::parallel::theta_update(s.cov, s.z, s.u, 1.0, s.theta);
        dyncon::parallel::z_update(s.theta, s.u, 1.0, 0.1, 0.1, false, s.z);
        benchmark::DoNotOptimize(s.z);
    }
}

}  // namespace

BENCHMARK(BM_covariance_serial)->Args({120, 10})->Args({180, 15});
BENCHMARK(BM_covariance_openmp)->Args({120, 10})->Args({180, 15});
BENCHMARK(BM_admm_iteration_serial)->Args({120, 10})->Args({180, 15});
BENCHMARK(BM_admm_iteration_openmp)->Args({120, 10})->Args({180, 15});

BENCHMARK_MAIN();
