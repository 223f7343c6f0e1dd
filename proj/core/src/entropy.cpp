#include "qwalk2d/entropy.hpp"

#include "qwalk2d/errors.hpp"
#include "qwalk2d/hermitian.hpp"
#include "qwalk2d/threads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qwalk {

namespace {

// Per-row accumulator for the coin Gram matrix: 4 diagonal norms and the 6
// upper-triangle products. Mirroring at the end keeps the result exactly
// Hermitian.
struct GramAcc {
    std::array<double, 4> diag{};
    std::array<cplx, 6> off{};

    GramAcc operator+(const GramAcc& o) const {
        GramAcc r;
        for (int i = 0; i < 4; ++i) r.diag[i] = diag[i] + o.diag[i];
        for (int i = 0; i < 6; ++i) r.off[i] = off[i] + o.off[i];
        return r;
    }
};

constexpr int kOffPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

} // namespace

Mat4 coin_density(const FieldView& field, int threads) {
    const int n = field.n;
    std::vector<GramAcc> rows(static_cast<std::size_t>(2 * n + 1));
    parallel_blocks(0, 2 * n + 1, threads, [&](int lo, int hi) {
        for (int xi = lo; xi < hi; ++xi) {
            const int x = xi - n;
            GramAcc acc;
            const int ylim = n - std::abs(x);
            for (int y = -ylim; y <= ylim; y += 2) {
                const cplx* a = field.at(x, y);
                for (int i = 0; i < 4; ++i) acc.diag[i] += std::norm(a[i]);
                for (int k = 0; k < 6; ++k)
                    acc.off[k] += a[kOffPairs[k][0]] * std::conj(a[kOffPairs[k][1]]);
            }
            rows[static_cast<std::size_t>(xi)] = acc;
        }
    });
    const GramAcc total = tree_reduce(rows, [](const GramAcc& p, const GramAcc& q) { return p + q; });

    Mat4 rho;
    for (int i = 0; i < 4; ++i) rho(i, i) = total.diag[i];
    for (int k = 0; k < 6; ++k) {
        rho(kOffPairs[k][0], kOffPairs[k][1]) = total.off[k];
        rho(kOffPairs[k][1], kOffPairs[k][0]) = std::conj(total.off[k]);
    }
    return rho;
}

std::array<double, 4> hermitian_eigenvalues(const Mat4& m) {
    if (hermiticity_defect(m) > 1e-12)
        throw NotHermitian("defect " + std::to_string(hermiticity_defect(m)));
    return jacobi_eigen4(m);
}

SpectralPair spectral_pair(double det) {
    if (det < -1e-12 || det > 0.25 + 1e-12)
        throw OutOfRange("determinant " + std::to_string(det) + " outside [0, 1/4]");
    const double clamped = std::clamp(det, 0.0, 0.25);
    const double root = std::sqrt(0.25 - clamped);
    return {0.5 + root, 0.5 - root};
}

KroneckerCheck kronecker_factor_check(const Mat4& rho, double threshold) {
    // R[(i1, j1), (i2, j2)] = rho[(i1, i2), (j1, j2)]: a Kronecker product
    // becomes rank one under this index rearrangement.
    Mat4 r;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < 2; ++i2)
                for (int j2 = 0; j2 < 2; ++j2)
                    r(2 * i1 + j1, 2 * i2 + j2) = rho(2 * i1 + i2, 2 * j1 + j2);

    const Svd4 svd = svd4(r);
    KroneckerCheck out;
    out.residual = svd.svals[1];
    out.factorable = out.residual < threshold;
    if (!out.factorable) return out;

    Mat2 f, g;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            f(i, j) = svd.u(2 * i + j, 0);
            g(i, j) = svd.svals[0] * std::conj(svd.v(2 * i + j, 0));
        }
    // Fix the scale split so both factors have unit trace (their traces are
    // nonzero whenever rho is a density Kronecker product).
    const cplx tf = trace(f);
    for (int i = 0; i < 4; ++i) {
        g.e[i] *= tf;
        f.e[i] /= tf;
    }
    // Drop numerical dust off Hermiticity and renormalize exactly.
    Mat2 fh, gh;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            fh(i, j) = 0.5 * (f(i, j) + std::conj(f(j, i)));
            gh(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
        }
    const double tg = trace(gh).real();
    for (int i = 0; i < 4; ++i) gh.e[i] /= tg;
    out.first = fh;
    out.second = gh;
    return out;
}

double von_neumann_entropy(std::span<const double> eigs) {
    double sum = 0.0;
    for (double e : eigs) {
        if (e < -1e-12)
            throw BadSpectrum("negative eigenvalue " + std::to_string(e));
        sum += e;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw BadSpectrum("spectrum sums to " + std::to_string(sum));
    double s = 0.0;
    for (double e : eigs) s -= plogp(std::max(e, 0.0));
    return s;
}

double position_entropy_small(const FieldView& field) {
    const int n = field.n;
    if (n > 8) throw TooLarge("direct position diagonalization capped at n = 8");

    // Support sites (diamond, parity) in a fixed scan order.
    std::vector<std::pair<int, int>> sites;
    for (int x = -n; x <= n; ++x) {
        const int ylim = n - std::abs(x);
        for (int y = -ylim; y <= ylim; y += 2) sites.emplace_back(x, y);
    }
    const int m = static_cast<int>(sites.size());

    std::vector<cplx> rho(static_cast<std::size_t>(m) * m);
    for (int s = 0; s < m; ++s) {
        const cplx* as = field.at(sites[s].first, sites[s].second);
        for (int t = 0; t < m; ++t) {
            const cplx* at = field.at(sites[t].first, sites[t].second);
            cplx acc = 0.0;
            for (int cmp = 0; cmp < 4; ++cmp) acc += as[cmp] * std::conj(at[cmp]);
            rho[static_cast<std::size_t>(s) * m + t] = acc;
        }
    }
    jacobi_hermitian(m, rho, nullptr);

    std::vector<double> eigs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) eigs[i] = rho[static_cast<std::size_t>(i) * m + i].real();
    std::sort(eigs.begin(), eigs.end(), std::greater<>());
    return von_neumann_entropy(eigs);
}

double shannon_entropy(const ProbabilityGrid& grid, int threads) {
    const int ext = 2 * grid.n + 1;
    std::vector<double> rows(static_cast<std::size_t>(ext), 0.0);
    parallel_blocks(0, ext, threads, [&](int lo, int hi) {
        for (int xi = lo; xi < hi; ++xi) {
            double acc = 0.0;
            const double* row = grid.p.data() + static_cast<std::size_t>(xi) * ext;
            for (int yi = 0; yi < ext; ++yi) acc -= plogp(row[yi]);
            rows[static_cast<std::size_t>(xi)] = acc;
        }
    });
    return tree_reduce(rows, [](double p, double q) { return p + q; });
}

namespace {

// Entropy and norm of one component's position distribution. Two passes with
// per-row partials, so results do not depend on the thread partition.
std::pair<double, double> component_entropy_norm(const FieldView& field, int component) {
    const int n = field.n;
    std::vector<double> rows(static_cast<std::size_t>(2 * n + 1), 0.0);
    for (int x = -n; x <= n; ++x) {
        double acc = 0.0;
        const int ylim = n - std::abs(x);
        for (int y = -ylim; y <= ylim; y += 2) acc += std::norm(field.at(x, y)[component]);
        rows[static_cast<std::size_t>(x + n)] = acc;
    }
    const double norm = tree_reduce(rows, [](double p, double q) { return p + q; });
    if (norm < 1e-14) return {std::numeric_limits<double>::quiet_NaN(), norm};

    std::fill(rows.begin(), rows.end(), 0.0);
    for (int x = -n; x <= n; ++x) {
        double acc = 0.0;
        const int ylim = n - std::abs(x);
        for (int y = -ylim; y <= ylim; y += 2)
            acc -= plogp(std::norm(field.at(x, y)[component]) / norm);
        rows[static_cast<std::size_t>(x + n)] = acc;
    }
    return {tree_reduce(rows, [](double p, double q) { return p + q; }), norm};
}

} // namespace

double conditional_entropy(const FieldView& field, int component) {
    if (component < 0 || component > 3)
        throw OutOfRange("component index " + std::to_string(component));
    const auto [s, norm] = component_entropy_norm(field, component);
    if (std::isnan(s))
        throw EmptyComponent("component " + std::to_string(component) + " norm " +
                             std::to_string(norm));
    return s;
}

ComponentStats component_entropies(const FieldView& field) {
    ComponentStats stats{};
    for (int c = 0; c < 4; ++c) {
        const auto [s, norm] = component_entropy_norm(field, c);
        stats.entropy[static_cast<std::size_t>(c)] = s;
        stats.norm[static_cast<std::size_t>(c)] = norm;
    }
    return stats;
}

} // namespace qwalk
