#pragma once

#include "qwalk2d/complexmat.hpp"

namespace qwalk {

/// U(2) coin in the parametrization U = [[a, b], [c, d]] with
/// c = -conj(b) * delta, d = conj(a) * delta and |delta| = 1, so that
/// det U = delta and the rows are orthonormal by construction.
struct CoinParameters {
    cplx a, b, c, d, delta;
};

/// Validates |a|^2 + |b|^2 = 1 (tolerance 1e-10, else NotNormalized) and
/// |delta| = 1 (tolerance 1e-10, else NotUnitDeterminant), then completes the
/// second row.
CoinParameters build_coin(cplx a, cplx b, cplx delta);

/// One-angle real family U(theta) = [[cos, sin], [sin, -cos]] (delta = -1).
/// theta must lie strictly inside (0, pi/2), else OutOfRange.
CoinParameters coin_from_angle(double theta);

/// The 4x4 walk coin U tensor U acting on the direction space (L, R, D, U).
Mat4 tensor_square(const CoinParameters& coin);

/// Row r of tensor_square(coin), the only nonzero row of the r-th shift
/// matrix. Order: P (row 0, shift x+1), Q (row 1, shift x-1), R (row 2,
/// shift y+1), S (row 3, shift y-1).
struct DirectionRows {
    Vec4 p, q, r, s;

    const Vec4& operator[](int i) const {
        switch (i) {
            case 0: return p;
            case 1: return q;
            case 2: return r;
            default: return s;
        }
    }
};

DirectionRows split_directions(const Mat4& tensor);

/// Embeds one direction row back into its 4x4 matrix (zero except row
/// `which`). P + Q + R + S reassembles the tensor coin exactly.
Mat4 direction_matrix(const DirectionRows& rows, int which);

/// True when any of a, b, c, d is numerically zero (|.| <= 1e-12); several
/// asymptotic quantities are undefined for such coins.
bool is_degenerate(const CoinParameters& coin);

} // namespace qwalk
