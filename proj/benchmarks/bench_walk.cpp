#include "qwalk2d/asymptotics.hpp"
#include "qwalk2d/coin.hpp"
#include "qwalk2d/entropy.hpp"
#include "qwalk2d/evolution.hpp"
#include "qwalk2d/hermitian.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace qwalk;

namespace {

const CoinParameters kHadamard = coin_from_angle(std::numbers::pi / 4);
const InitialState kLeft = make_initial_state(1, 0, 0, 0);

void bm_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int threads = static_cast<int>(state.range(1));
    const DirectionRows rows = split_directions(tensor_square(kHadamard));
    const AmplitudeField field = evolve(kHadamard, kLeft, n);
    for (auto _ : state) {
        AmplitudeField next = step(field, rows, threads);
        benchmark::DoNotOptimize(next.at(0, 0));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n + 1) *
                            (2 * n + 1));
}

void bm_coin_density(benchmark::State& state) {
    const int threads = static_cast<int>(state.range(0));
    const AmplitudeField field = evolve(kHadamard, kLeft, 128, {.threads = 4});
    for (auto _ : state) {
        Mat4 rho = coin_density(field, threads);
        benchmark::DoNotOptimize(rho.e[0]);
    }
}

void bm_shannon(benchmark::State& state) {
    const AmplitudeField field = evolve(kHadamard, kLeft, 128, {.threads = 4});
    const ProbabilityGrid grid = distribution(field);
    for (auto _ : state) {
        double s = shannon_entropy(grid);
        benchmark::DoNotOptimize(s);
    }
}

void bm_eigen4(benchmark::State& state) {
    const Mat4 rho = coin_density(evolve(kHadamard, kLeft, 64).view());
    for (auto _ : state) {
        auto eigs = jacobi_eigen4(rho);
        benchmark::DoNotOptimize(eigs[0]);
    }
}

void bm_spectral_weight(benchmark::State& state) {
    const WeightCoefficients w = weight_coefficients(kHadamard, kLeft);
    double x = -0.49;
    for (auto _ : state) {
        double h = weight_h(0, x, 0.21, w, kHadamard);
        benchmark::DoNotOptimize(h);
        x += 1e-6;
    }
}

void bm_limiting_density(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const QuadratureGrid grid = make_grid(kHadamard, n);
    for (auto _ : state) {
        Mat4 rho = limiting_density_matrix(kHadamard, kLeft, grid);
        benchmark::DoNotOptimize(rho.e[0]);
    }
}

} // namespace

BENCHMARK(bm_step)
    ->Args({64, 1})
    ->Args({128, 1})
    ->Args({256, 1})
    ->Args({256, 4})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_coin_density)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_shannon)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_eigen4);
BENCHMARK(bm_spectral_weight);
BENCHMARK(bm_limiting_density)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
