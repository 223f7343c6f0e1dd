#pragma once

#include <cstdint>
#include <vector>

namespace qwalk {

/// Binomial(n, 1/2) probabilities, computed in log space via lgamma so they
/// stay finite far beyond the naive overflow point. n <= 2^20, else TooLarge.
std::vector<double> binomial_distribution(std::int64_t n);

/// Shannon entropy (bits) of the position of the simple 1D random walk at
/// time n, i.e. of the Binomial(n, 1/2) displacement distribution.
double rw_entropy(std::int64_t n);

/// Same sum carried in long double throughout, for precision cross-checks.
double rw_entropy_extended(std::int64_t n);

/// Diffusive-scaling report rows at n = 2^4, 2^5, ..., up to n_max:
/// ratio1 = S_n / log2(sqrt(n)), bracket2 = log2(sqrt(n)) * (ratio1 - 1).
struct ClassicalRow {
    std::int64_t n;
    double s_rw;
    double ratio1;
    double bracket2;
};

struct ClassicalReport {
    std::vector<ClassicalRow> rows;
    double half_log_2pie;     // (1/2) log2(2 pi e), the claimed bracket limit
    double measured_bracket;  // trailing bracket2 value
    double ratio_at_nmax;
    bool ratio_monotone_decreasing;
};

/// Requires n_max >= 2^10 (TooShort); rows capped at n = 2^20.
ClassicalReport rw_limit_report(std::int64_t n_max);

} // namespace qwalk
