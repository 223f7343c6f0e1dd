#pragma once

#include "qwalk2d/complexmat.hpp"

#include <vector>

namespace qwalk {

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// A is n*n row major and gets overwritten with the diagonalized matrix.
/// If V is non-null it receives the unitary of eigenvectors (columns), i.e.
/// A_in = V diag(A_out) V^dagger. Convergence: off-diagonal Frobenius norm
/// below tol * max(1, ||A||_F), at most max_sweeps cyclic sweeps.
/// Returns the number of sweeps used.
int jacobi_hermitian(int n, std::vector<cplx>& A, std::vector<cplx>* V,
                     double tol = 1e-14, int max_sweeps = 50);

/// Eigenvalues of a Hermitian 4x4, descending. If vectors is non-null it
/// receives the matching eigenvector columns.
std::array<double, 4> jacobi_eigen4(const Mat4& m, Mat4* vectors = nullptr);

/// Eigenvalues (descending) and vectors of a Hermitian 2x2.
std::array<double, 2> jacobi_eigen2(const Mat2& m, Mat2* vectors = nullptr);

/// Full eigensystem of a unitary 4x4. Unitaries are normal but not Hermitian;
/// we diagonalize the Hermitian part first and then resolve clusters with
/// equal cosines using the skew part restricted to the cluster, which is
/// Hermitian after division by i and commutes there. values[j] pairs with
/// vector column j; no ordering is guaranteed beyond determinism.
struct Eigensystem4 {
    std::array<cplx, 4> values;
    Mat4 vectors;
};

Eigensystem4 unitary_eigensystem(const Mat4& w);

/// Singular value decomposition of a 4x4 via the Hermitian eigensystem of
/// m^dagger m. svals descending; columns of u/v are the singular vectors
/// (u only for svals > 1e-300, other columns zero).
struct Svd4 {
    std::array<double, 4> svals;
    Mat4 u, v;
};

Svd4 svd4(const Mat4& m);

} // namespace qwalk
