#include "qwalk2d/classical.hpp"

#include "qwalk2d/errors.hpp"
#include "qwalk2d/threads.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace qwalk {

namespace {

constexpr std::int64_t kMaxN = std::int64_t{1} << 20;

template <class Real>
Real entropy_bits(std::int64_t n) {
    // ln C(n, k) - n ln 2 via lgamma, so the sum never touches a subnormal
    // binomial coefficient even at n = 2^20.
    const Real ln2 = std::numbers::ln2_v<Real>;
    std::vector<Real> parts(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) {
        const Real lnp = std::lgamma(static_cast<Real>(n + 1)) -
                         std::lgamma(static_cast<Real>(k + 1)) -
                         std::lgamma(static_cast<Real>(n - k + 1)) -
                         static_cast<Real>(n) * ln2;
        parts[static_cast<std::size_t>(k)] = -std::exp(lnp) * (lnp / ln2);
    }
    return tree_reduce(parts, [](Real p, Real q) { return p + q; });
}

} // namespace

std::vector<double> binomial_distribution(std::int64_t n) {
    if (n < 0) throw OutOfRange("negative time");
    if (n > kMaxN) throw TooLarge("binomial capped at n = 2^20, got " + std::to_string(n));
    std::vector<double> p(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) {
        const double lnp = std::lgamma(static_cast<double>(n + 1)) -
                           std::lgamma(static_cast<double>(k + 1)) -
                           std::lgamma(static_cast<double>(n - k + 1)) -
                           static_cast<double>(n) * std::numbers::ln2;
        p[static_cast<std::size_t>(k)] = std::exp(lnp);
    }
    return p;
}

double rw_entropy(std::int64_t n) {
    if (n < 0) throw OutOfRange("negative time");
    if (n > kMaxN) throw TooLarge("binomial capped at n = 2^20, got " + std::to_string(n));
    if (n == 0) return 0.0;
    return entropy_bits<double>(n);
}

double rw_entropy_extended(std::int64_t n) {
    if (n < 0) throw OutOfRange("negative time");
    if (n > kMaxN) throw TooLarge("binomial capped at n = 2^20, got " + std::to_string(n));
    if (n == 0) return 0.0;
    return static_cast<double>(entropy_bits<long double>(n));
}

ClassicalReport rw_limit_report(std::int64_t n_max) {
    if (n_max < (std::int64_t{1} << 10))
        throw TooShort("need n_max >= 2^10, got " + std::to_string(n_max));

    ClassicalReport rep;
    rep.half_log_2pie = 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e);
    rep.ratio_monotone_decreasing = true;

    for (std::int64_t n = 16; n <= std::min(n_max, kMaxN); n *= 2) {
        const double s = rw_entropy(n);
        const double half_log_n = 0.5 * std::log2(static_cast<double>(n));
        const double ratio1 = s / half_log_n;
        const double bracket2 = half_log_n * (ratio1 - 1.0);
        if (!rep.rows.empty() && ratio1 >= rep.rows.back().ratio1)
            rep.ratio_monotone_decreasing = false;
        rep.rows.push_back({n, s, ratio1, bracket2});
    }
    rep.measured_bracket = rep.rows.back().bracket2;
    rep.ratio_at_nmax = rep.rows.back().ratio1;
    return rep;
}

} // namespace qwalk
