#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qwalk2d/classical.hpp"
#include "qwalk2d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace qwalk;

TEST_CASE("binomial distribution at small n") {
    const std::vector<double> p4 = binomial_distribution(4);
    REQUIRE(p4.size() == 5);
    const double want[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    for (int k = 0; k <= 4; ++k) CHECK(std::abs(p4[k] - want[k]) < 1e-15);

    double total = 0.0;
    for (double p : binomial_distribution(1001)) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);

    CHECK_THROWS_AS(binomial_distribution((1 << 20) + 1), TooLarge);
}

TEST_CASE("random walk entropy at reference times") {
    CHECK(rw_entropy(0) == 0.0);
    CHECK(rw_entropy(2) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(rw_entropy(4) == doctest::Approx(2.0306390622295662).epsilon(1e-14));
}

TEST_CASE("entropy matches a direct summation at n = 64") {
    const std::vector<double> p = binomial_distribution(64);
    double s = 0.0;
    for (double q : p)
        if (q > 0) s -= q * std::log2(q);
    CHECK(rw_entropy(64) == doctest::Approx(s).epsilon(1e-13));
}

TEST_CASE("long double accumulation agrees with the double path") {
    for (std::int64_t n : {1 << 8, 1 << 10, 1 << 14})
        CHECK(std::abs(rw_entropy_extended(n) - rw_entropy(n)) < 1e-11);
}

TEST_CASE("entropy is invariant under permuting the distribution") {
    std::vector<double> p = binomial_distribution(40);
    double s_orig = 0.0;
    for (double q : p)
        if (q > 0) s_orig -= q * std::log2(q);
    std::mt19937 rng(61u);
    std::shuffle(p.begin(), p.end(), rng);
    double s_perm = 0.0;
    for (double q : p)
        if (q > 0) s_perm -= q * std::log2(q);
    CHECK(std::abs(s_orig - s_perm) < 1e-14);
}

TEST_CASE("diffusive scaling report") {
    const ClassicalReport rep = rw_limit_report(1 << 16);
    REQUIRE(rep.rows.size() == 13); // n = 2^4 .. 2^16
    CHECK(rep.rows.front().n == 16);
    CHECK(rep.rows.back().n == 1 << 16);

    CHECK(rep.half_log_2pie ==
          doctest::Approx(0.5 * std::log2(2 * std::numbers::pi * std::numbers::e))
              .epsilon(1e-15));
    CHECK(rep.ratio_at_nmax == doctest::Approx(1.1309).epsilon(2e-3));
    CHECK(rep.measured_bracket == doctest::Approx(1.0471).epsilon(2e-3));
    CHECK(rep.ratio_monotone_decreasing);

    for (const ClassicalRow& row : rep.rows) {
        const double half_log = 0.5 * std::log2(static_cast<double>(row.n));
        CHECK(row.ratio1 == doctest::Approx(row.s_rw / half_log).epsilon(1e-14));
        CHECK(row.bracket2 == doctest::Approx(half_log * (row.ratio1 - 1)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(rw_limit_report(512), TooShort);
}

TEST_CASE("the diffusive offset stays bounded") {
    // the walk lives on sites of one parity, spaced 2, with displacement
    // variance n, so the Gaussian surrogate has entropy
    //   (1/2) log2(2 pi e n / 4) = (1/2) log2 n + (1/2) log2(2 pi e) - 1
    // and the offset S_n - (1/2) log2 n settles one bit below the
    // unit-variance constant
    const double limit = 0.5 * std::log2(2 * std::numbers::pi * std::numbers::e) - 1.0;
    for (int e = 4; e <= 20; e += 2) {
        const std::int64_t n = std::int64_t{1} << e;
        const double offset = rw_entropy(n) - 0.5 * std::log2(static_cast<double>(n));
        CHECK(offset > 0.0);
        CHECK(offset < limit + 0.5);
        if (e >= 8) CHECK(std::abs(offset - limit) < 0.01);
    }
}
