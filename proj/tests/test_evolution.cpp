#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qwalk2d/coin.hpp"
#include "qwalk2d/errors.hpp"
#include "qwalk2d/evolution.hpp"
#include "sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qwalk;

namespace {

const CoinParameters kHadamard = coin_from_angle(std::numbers::pi / 4);
const InitialState kLeft = make_initial_state(1, 0, 0, 0);

double field_max_diff(const AmplitudeField& a, const AmplitudeField& b) {
    REQUIRE(a.view().n == b.view().n);
    const int n = a.view().n;
    double worst = 0.0;
    for (int x = -n; x <= n; ++x)
        for (int y = -(n - std::abs(x)); y <= n - std::abs(x); y += 2)
            for (int c = 0; c < 4; ++c)
                worst = std::max(worst, std::abs(a.at(x, y)[c] - b.at(x, y)[c]));
    return worst;
}

} // namespace

TEST_CASE("make_initial_state enforces normalization") {
    CHECK_THROWS_AS(make_initial_state(1, 1, 0, 0), NotNormalized);
    CHECK_THROWS_AS(make_initial_state(0.5, 0.5, 0.5, 0.49), NotNormalized);
    const double s = 0.5;
    CHECK_NOTHROW(make_initial_state(s, cplx(0, s), cplx(0, s), -s));
}

TEST_CASE("one Hadamard step from the origin") {
    const AmplitudeField f = evolve(kHadamard, kLeft, 1);
    // each direction amplitude lands in its own component at its own site
    CHECK(std::abs(f.at(-1, 0)[0] - 0.5) < 1e-15);
    CHECK(std::abs(f.at(1, 0)[1] - 0.5) < 1e-15);
    CHECK(std::abs(f.at(0, -1)[2] - 0.5) < 1e-15);
    CHECK(std::abs(f.at(0, 1)[3] - 0.5) < 1e-15);
    for (int c : {1, 2, 3}) CHECK(std::abs(f.at(-1, 0)[c]) == 0.0);
}

TEST_CASE("two Hadamard steps: interference at the origin") {
    const AmplitudeField f = evolve(kHadamard, kLeft, 2);
    const cplx* center = f.at(0, 0);
    CHECK(std::abs(center[0] - 0.25) < 1e-15);
    CHECK(std::abs(center[1] - 0.25) < 1e-15);
    CHECK(std::abs(center[2] + 0.25) < 1e-15);
    CHECK(std::abs(center[3] + 0.25) < 1e-15);

    const ProbabilityGrid g = distribution(f);
    CHECK(std::abs(g.at(0, 0) - 0.25) < 1e-15);
    for (auto [x, y] : {std::pair{1, 1}, {1, -1}, {-1, 1}, {-1, -1}})
        CHECK(std::abs(g.at(x, y) - 0.125) < 1e-15);
    for (auto [x, y] : {std::pair{2, 0}, {-2, 0}, {0, 2}, {0, -2}})
        CHECK(std::abs(g.at(x, y) - 0.0625) < 1e-15);
}

TEST_CASE("evolve equals repeated step bitwise") {
    std::mt19937 rng(31u);
    const CoinParameters coin = sampling::coin(rng);
    const InitialState phi = sampling::state(rng);
    const DirectionRows rows = split_directions(tensor_square(coin));

    AmplitudeField manual = initial_field(phi);
    for (int i = 0; i < 7; ++i) manual = step(manual, rows);
    const AmplitudeField direct = evolve(coin, phi, 7);
    CHECK(field_max_diff(manual, direct) == 0.0);
}

TEST_CASE("norm is conserved over long runs") {
    std::mt19937 rng(32u);
    for (int trial = 0; trial < 3; ++trial) {
        const AmplitudeField f = evolve(sampling::coin(rng), sampling::state(rng), 64);
        CHECK(std::abs(f.norm_sq() - 1.0) < 1e-13);
    }
}

TEST_CASE("wrong-parity sites hold bitwise zero") {
    std::mt19937 rng(33u);
    const AmplitudeField f = evolve(sampling::coin(rng), sampling::state(rng), 5);
    const FieldView v = f.view();
    for (int x = -5; x <= 5; ++x)
        for (int y = -5; y <= 5; ++y) {
            if (((x + y + 5) % 2 + 2) % 2 == 0) continue;
            for (int c = 0; c < 4; ++c) CHECK(v.at(x, y)[c] == cplx{});
        }
}

TEST_CASE("identity coin transports the up component ballistically") {
    const CoinParameters identity = build_coin(1.0, 0.0, 1.0);
    const InitialState up = make_initial_state(0, 0, 0, 1);
    const AmplitudeField f = evolve(identity, up, 9);
    CHECK(std::abs(f.at(0, 9)[3] - 1.0) < 1e-15);
    CHECK(std::abs(distribution(f).at(0, 9) - 1.0) < 1e-15);
}

TEST_CASE("threads do not change a single bit") {
    std::mt19937 rng(34u);
    const CoinParameters coin = sampling::coin(rng);
    const InitialState phi = sampling::state(rng);

    const AmplitudeField base = evolve(coin, phi, 33, {.threads = 1});
    for (int threads : {2, 3, 8}) {
        const AmplitudeField f =
            evolve(coin, phi, 33, {.threads = threads, .memory_cap_bytes = 4ull << 30});
        CHECK(field_max_diff(base, f) == 0.0);
    }
}

TEST_CASE("walker advances to its horizon and no further") {
    Walker w(kHadamard, kLeft, 3, {});
    CHECK(w.time() == 0);
    CHECK(w.horizon() == 3);
    for (int n = 1; n <= 3; ++n) {
        w.advance();
        CHECK(w.time() == n);
    }
    CHECK_THROWS_AS(w.advance(), OutOfRange);

    const AmplitudeField snap = w.snapshot();
    const AmplitudeField direct = evolve(kHadamard, kLeft, 3);
    CHECK(field_max_diff(snap, direct) == 0.0);
}

TEST_CASE("walker refuses horizons beyond the memory cap") {
    EvolveOptions tiny;
    tiny.memory_cap_bytes = 1 << 20;
    CHECK_THROWS_AS(Walker(kHadamard, kLeft, 4096, tiny), ResourceLimit);
}

TEST_CASE("path-sum oracle matches evolution in probability") {
    std::mt19937 rng(35u);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const CoinParameters coin = sampling::coin(rng);
        const InitialState phi = sampling::state(rng);
        const int n = 1 + trial % 6;
        const AmplitudeField direct = evolve(coin, phi, n);
        const AmplitudeField summed = path_sum_oracle(coin, n).field(phi);
        for (int x = -n; x <= n; ++x)
            for (int y = -(n - std::abs(x)); y <= n - std::abs(x); y += 2) {
                double pd = 0.0, ps = 0.0;
                for (int c = 0; c < 4; ++c) {
                    pd += std::norm(direct.at(x, y)[c]);
                    ps += std::norm(summed.at(x, y)[c]);
                }
                worst = std::max(worst, std::abs(pd - ps));
            }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("path-sum oracle groups direction words into composition classes") {
    const PathSumOracle oracle = path_sum_oracle(kHadamard, 3);
    // compositions of 3 into 4 ordered nonnegative parts: C(6,3) = 20
    CHECK(oracle.classes.size() == 20);
    CHECK_THROWS_AS(path_sum_oracle(kHadamard, 9), TooLarge);
}

TEST_CASE("distribution sums to one and vanishes off the diamond") {
    std::mt19937 rng(36u);
    const AmplitudeField f = evolve(sampling::coin(rng), sampling::state(rng), 12);
    const ProbabilityGrid g = distribution(f);
    double total = 0.0;
    for (double p : g.p) total += p;
    CHECK(std::abs(total - 1.0) < 1e-13);
    CHECK(g.at(12, 12) == 0.0);
    CHECK(g.at(-12, 1) == 0.0);
}
