#include "qwalk2d/coin.hpp"

#include "qwalk2d/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qwalk {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

CoinParameters build_coin(cplx a, cplx b, cplx delta) {
    const double row = std::norm(a) + std::norm(b);
    if (std::abs(row - 1.0) > 1e-10)
        throw NotNormalized("|a|^2 + |b|^2 = " + num(row) + ", expected 1");
    const double dmag = std::abs(delta);
    if (std::abs(dmag - 1.0) > 1e-10)
        throw NotUnitDeterminant("|delta| = " + num(dmag) + ", expected 1");
    CoinParameters coin;
    coin.a = a;
    coin.b = b;
    coin.c = -delta * std::conj(b);
    coin.d = delta * std::conj(a);
    coin.delta = delta;
    return coin;
}

CoinParameters coin_from_angle(double theta) {
    if (!(theta > 0.0) || !(theta < std::numbers::pi / 2))
        throw OutOfRange("theta = " + num(theta) + " outside (0, pi/2)");
    // [[cos, sin], [sin, -cos]]: delta = -1, so c = conj(b), d = -conj(a).
    return build_coin(std::cos(theta), std::sin(theta), -1.0);
}

Mat4 tensor_square(const CoinParameters& coin) {
    const Mat2 u{{coin.a, coin.b, coin.c, coin.d}};
    return kron(u, u);
}

DirectionRows split_directions(const Mat4& tensor) {
    DirectionRows rows;
    for (int j = 0; j < 4; ++j) {
        rows.p[j] = tensor(0, j);
        rows.q[j] = tensor(1, j);
        rows.r[j] = tensor(2, j);
        rows.s[j] = tensor(3, j);
    }
    return rows;
}

Mat4 direction_matrix(const DirectionRows& rows, int which) {
    if (which < 0 || which > 3) throw OutOfRange("direction index " + std::to_string(which));
    Mat4 m;
    for (int j = 0; j < 4; ++j) m(which, j) = rows[which][j];
    return m;
}

bool is_degenerate(const CoinParameters& coin) {
    const double floor = 1e-12;
    return std::abs(coin.a) <= floor || std::abs(coin.b) <= floor ||
           std::abs(coin.c) <= floor || std::abs(coin.d) <= floor;
}

} // namespace qwalk
