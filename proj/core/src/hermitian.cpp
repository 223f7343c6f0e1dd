#include "qwalk2d/hermitian.hpp"

#include "qwalk2d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qwalk {

namespace {

double offdiag_frobenius(int n, const std::vector<cplx>& a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::norm(a[static_cast<std::size_t>(i) * n + j]);
    return std::sqrt(s);
}

double frobenius(int n, const std::vector<cplx>& a) {
    double s = 0.0;
    for (int i = 0; i < n * n; ++i) s += std::norm(a[i]);
    return std::sqrt(s);
}

} // namespace

int jacobi_hermitian(int n, std::vector<cplx>& A, std::vector<cplx>* V, double tol,
                     int max_sweeps) {
    auto at = [&](int i, int j) -> cplx& { return A[static_cast<std::size_t>(i) * n + j]; };

    if (V) {
        V->assign(static_cast<std::size_t>(n) * n, cplx{});
        for (int i = 0; i < n; ++i) (*V)[static_cast<std::size_t>(i) * n + i] = 1.0;
    }

    const double scale = std::max(1.0, frobenius(n, A));
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (offdiag_frobenius(n, A) <= tol * scale) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = at(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const cplx phase = apq / mag;
                const double tau = (at(q, q).real() - at(p, p).real()) / (2.0 * mag);
                const double sg = tau >= 0.0 ? 1.0 : -1.0;
                const double t = sg / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sp = s * phase;             // s e^{i arg apq}
                const cplx spc = s * std::conj(phase); // s e^{-i arg apq}

                // A <- A G (columns p, q)
                for (int k = 0; k < n; ++k) {
                    const cplx akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - spc * akq;
                    at(k, q) = sp * akp + c * akq;
                }
                // A <- G^dagger A (rows p, q)
                for (int k = 0; k < n; ++k) {
                    const cplx apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - sp * aqk;
                    at(q, k) = spc * apk + c * aqk;
                }
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                at(p, p) = at(p, p).real();
                at(q, q) = at(q, q).real();

                if (V) {
                    for (int k = 0; k < n; ++k) {
                        cplx& vkp = (*V)[static_cast<std::size_t>(k) * n + p];
                        cplx& vkq = (*V)[static_cast<std::size_t>(k) * n + q];
                        const cplx op = vkp, oq = vkq;
                        vkp = c * op - spc * oq;
                        vkq = sp * op + c * oq;
                    }
                }
            }
        }
    }
    return sweep;
}

std::array<double, 4> jacobi_eigen4(const Mat4& m, Mat4* vectors) {
    std::vector<cplx> a(m.e.begin(), m.e.end());
    std::vector<cplx> v;
    jacobi_hermitian(4, a, vectors ? &v : nullptr);

    std::array<int, 4> order{0, 1, 2, 3};
    std::array<double, 4> diag;
    for (int i = 0; i < 4; ++i) diag[i] = a[static_cast<std::size_t>(i) * 4 + i].real();
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return diag[x] > diag[y]; });

    std::array<double, 4> eigs;
    for (int i = 0; i < 4; ++i) eigs[i] = diag[order[i]];
    if (vectors) {
        for (int r = 0; r < 4; ++r)
            for (int i = 0; i < 4; ++i)
                (*vectors)(r, i) = v[static_cast<std::size_t>(r) * 4 + order[i]];
    }
    return eigs;
}

std::array<double, 2> jacobi_eigen2(const Mat2& m, Mat2* vectors) {
    std::vector<cplx> a(m.e.begin(), m.e.end());
    std::vector<cplx> v;
    jacobi_hermitian(2, a, vectors ? &v : nullptr);
    double d0 = a[0].real(), d1 = a[3].real();
    bool swap = d0 < d1;
    if (vectors) {
        for (int r = 0; r < 2; ++r) {
            (*vectors)(r, 0) = v[static_cast<std::size_t>(r) * 2 + (swap ? 1 : 0)];
            (*vectors)(r, 1) = v[static_cast<std::size_t>(r) * 2 + (swap ? 0 : 1)];
        }
    }
    if (swap) std::swap(d0, d1);
    return {d0, d1};
}

Eigensystem4 unitary_eigensystem(const Mat4& w) {
    const Mat4 wd = adjoint(w);
    Mat4 h, sk; // Hermitian and (divided by i) skew parts
    for (int i = 0; i < 16; ++i) {
        h.e[i] = 0.5 * (w.e[i] + wd.e[i]);
        sk.e[i] = (w.e[i] - wd.e[i]) / cplx(0.0, 2.0);
    }

    Mat4 vecs;
    const std::array<double, 4> cosv = jacobi_eigen4(h, &vecs);

    // Resolve clusters of equal cosines with the skew part. Within a
    // cluster the restriction of sk is Hermitian and commutes with w.
    int i = 0;
    while (i < 4) {
        int j = i + 1;
        while (j < 4 && std::abs(cosv[j] - cosv[i]) < 1e-10) ++j;
        const int m = j - i;
        if (m > 1) {
            std::vector<cplx> b(static_cast<std::size_t>(m) * m);
            for (int r = 0; r < m; ++r)
                for (int cidx = 0; cidx < m; ++cidx) {
                    cplx s = 0.0;
                    for (int k = 0; k < 4; ++k)
                        for (int l = 0; l < 4; ++l)
                            s += std::conj(vecs(k, i + r)) * sk(k, l) * vecs(l, i + cidx);
                    b[static_cast<std::size_t>(r) * m + cidx] = s;
                }
            std::vector<cplx> y;
            jacobi_hermitian(m, b, &y);
            Mat4 updated = vecs;
            for (int k = 0; k < 4; ++k)
                for (int cidx = 0; cidx < m; ++cidx) {
                    cplx s = 0.0;
                    for (int r = 0; r < m; ++r)
                        s += vecs(k, i + r) * y[static_cast<std::size_t>(r) * m + cidx];
                    updated(k, i + cidx) = s;
                }
            vecs = updated;
        }
        i = j;
    }

    Eigensystem4 out;
    out.vectors = vecs;
    for (int col = 0; col < 4; ++col) {
        cplx lam = 0.0;
        for (int r = 0; r < 4; ++r) {
            cplx wv = 0.0;
            for (int k = 0; k < 4; ++k) wv += w(r, k) * vecs(k, col);
            lam += std::conj(vecs(r, col)) * wv;
        }
        out.values[col] = lam;
    }
    return out;
}

Svd4 svd4(const Mat4& m) {
    const Mat4 gram = adjoint(m) * m;
    Svd4 out;
    out.svals = jacobi_eigen4(gram, &out.v);
    for (double& s : out.svals) s = std::sqrt(std::max(0.0, s));
    out.u = Mat4{};
    for (int col = 0; col < 4; ++col) {
        if (out.svals[col] <= 1e-300) continue;
        for (int r = 0; r < 4; ++r) {
            cplx s = 0.0;
            for (int k = 0; k < 4; ++k) s += m(r, k) * out.v(k, col);
            out.u(r, col) = s / out.svals[col];
        }
    }
    return out;
}

} // namespace qwalk
