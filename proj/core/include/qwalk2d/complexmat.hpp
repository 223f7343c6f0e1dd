#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace qwalk {

using cplx = std::complex<double>;

/// Dense 2x2 complex matrix, row major.
struct Mat2 {
    std::array<cplx, 4> e{};

    cplx& operator()(int r, int c) { return e[2 * r + c]; }
    const cplx& operator()(int r, int c) const { return e[2 * r + c]; }

    static Mat2 identity() {
        Mat2 m;
        m(0, 0) = m(1, 1) = 1.0;
        return m;
    }
};

/// Dense 4x4 complex matrix, row major.
struct Mat4 {
    std::array<cplx, 16> e{};

    cplx& operator()(int r, int c) { return e[4 * r + c]; }
    const cplx& operator()(int r, int c) const { return e[4 * r + c]; }

    static Mat4 identity() {
        Mat4 m;
        for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
        return m;
    }
};

using Vec4 = std::array<cplx, 4>;

inline Mat4 operator*(const Mat4& x, const Mat4& y) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx{}) continue;
            for (int j = 0; j < 4; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

inline Vec4 operator*(const Mat4& m, const Vec4& v) {
    Vec4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += m(i, j) * v[j];
    return r;
}

inline Mat4 operator+(const Mat4& x, const Mat4& y) {
    Mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e[i] = x.e[i] + y.e[i];
    return r;
}

inline Mat4 operator-(const Mat4& x, const Mat4& y) {
    Mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e[i] = x.e[i] - y.e[i];
    return r;
}

inline Mat4 operator*(double s, const Mat4& x) {
    Mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e[i] = s * x.e[i];
    return r;
}

inline Mat4 adjoint(const Mat4& m) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = std::conj(m(j, i));
    return r;
}

inline Mat2 adjoint(const Mat2& m) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = std::conj(m(j, i));
    return r;
}

inline cplx trace(const Mat4& m) { return m(0, 0) + m(1, 1) + m(2, 2) + m(3, 3); }
inline cplx trace(const Mat2& m) { return m(0, 0) + m(1, 1); }

inline cplx det(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

inline Mat4 kron(const Mat2& x, const Mat2& y) {
    Mat4 r;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < 2; ++i2)
                for (int j2 = 0; j2 < 2; ++j2)
                    r(2 * i1 + i2, 2 * j1 + j2) = x(i1, j1) * y(i2, j2);
    return r;
}

/// Rank-one update m += v v^dagger (outer product with the conjugate).
inline void add_outer(Mat4& m, const Vec4& v) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) += v[i] * std::conj(v[j]);
}

inline double frobenius_norm(const Mat4& m) {
    double s = 0.0;
    for (const cplx& z : m.e) s += std::norm(z);
    return std::sqrt(s);
}

inline double max_abs_diff(const Mat4& x, const Mat4& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < 16; ++i) d = std::max(d, std::abs(x.e[i] - y.e[i]));
    return d;
}

inline double hermiticity_defect(const Mat4& m) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
    return d;
}

} // namespace qwalk
