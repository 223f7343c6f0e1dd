#pragma once

#include "qwalk2d/complexmat.hpp"
#include "qwalk2d/evolution.hpp"

#include <array>
#include <span>

namespace qwalk {

/// Reduced coin density rho_n^c: entry (i, j) = sum over sites of
/// Psi^i conj(Psi^j). Hermitian, PSD, unit trace for a normalized field.
/// Reductions run over per-row partials combined by a fixed tree, so the
/// result is bitwise independent of the thread count.
Mat4 coin_density(const FieldView& field, int threads = 1);

/// Eigenvalues of a Hermitian 4x4, descending. Throws NotHermitian when the
/// Hermiticity defect exceeds 1e-12.
std::array<double, 4> hermitian_eigenvalues(const Mat4& m);

/// Eigenvalue pair r+- = 1/2 +- sqrt(1/4 - det) of a trace-one 2x2 density
/// with determinant det in [0, 1/4] (1e-12 slack is clamped, more is
/// OutOfRange).
struct SpectralPair {
    double r_plus, r_minus;
};

SpectralPair spectral_pair(double det);

/// Tests whether a 4x4 density is a Kronecker product of two 2x2 densities:
/// rearrange rho into R[(i1,j1),(i2,j2)] and check the second singular value.
/// residual is that singular value; factors (unit trace, Hermitian) are
/// meaningful only when factorable (residual < threshold).
struct KroneckerCheck {
    bool factorable = false;
    double residual = 0.0;
    Mat2 first, second;
};

KroneckerCheck kronecker_factor_check(const Mat4& rho, double threshold = 1e-8);

/// - sum eig log2 eig. Eigenvalues must be a spectrum: entries below -1e-12
/// or a sum off 1 by more than 1e-10 throw BadSpectrum; small negatives are
/// clamped to zero.
double von_neumann_entropy(std::span<const double> eigs);

/// Position-side von Neumann entropy by direct diagonalization of the
/// position density over parity-valid sites. Exact-check scale only: n <= 8,
/// else TooLarge. Equals the coin-side entropy (Schmidt).
double position_entropy_small(const FieldView& field);

/// - sum p log2 p over the position distribution.
double shannon_entropy(const ProbabilityGrid& grid, int threads = 1);

/// Shannon entropy of the normalized position distribution of one coin
/// component (0..3 = L, R, D, U). Throws EmptyComponent when the component
/// norm is below 1e-14.
double conditional_entropy(const FieldView& field, int component);

/// One-pass version for series output: per-component entropies and norms.
/// Empty components get entropy NaN and their (tiny) norm as computed.
struct ComponentStats {
    std::array<double, 4> entropy;
    std::array<double, 4> norm;
};

ComponentStats component_entropies(const FieldView& field);

} // namespace qwalk
