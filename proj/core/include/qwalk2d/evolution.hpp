#pragma once

#include "qwalk2d/coin.hpp"
#include "qwalk2d/complexmat.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace qwalk {

/// Coin state at the origin, (alpha, beta, gamma, lambda) in the (L, R, D, U)
/// basis. Use make_initial_state to get norm validation (1e-10, else
/// NotNormalized).
struct InitialState {
    cplx alpha, beta, gamma, lambda;

    cplx operator[](int i) const {
        switch (i) {
            case 0: return alpha;
            case 1: return beta;
            case 2: return gamma;
            default: return lambda;
        }
    }
};

InitialState make_initial_state(cplx alpha, cplx beta, cplx gamma, cplx lambda);

/// Non-owning view of a field at time n: four amplitudes per site on the
/// square |x|, |y| <= n embedded in a row-major grid with the given stride.
/// Sites with x + y + n odd hold exact zeros (parity invariant).
struct FieldView {
    int n = 0;
    int stride = 1;
    const cplx* origin = nullptr; // points at the (0, 0) site

    const cplx* at(int x, int y) const { return origin + 4 * (static_cast<std::ptrdiff_t>(x) * stride + y); }
};

/// Owning field at a fixed time. step() and evolve() produce these.
class AmplitudeField {
public:
    AmplitudeField() : AmplitudeField(0) {}
    explicit AmplitudeField(int n);

    int time() const { return n_; }
    int extent() const { return 2 * n_ + 1; }

    const cplx* at(int x, int y) const { return view().at(x, y); }
    cplx* at(int x, int y) {
        return data_.data() + 4 * (static_cast<std::ptrdiff_t>(x + n_) * extent() + (y + n_));
    }

    FieldView view() const {
        return {n_, extent(), data_.data() + 4 * (static_cast<std::ptrdiff_t>(n_) * extent() + n_)};
    }
    operator FieldView() const { return view(); }

    double norm_sq() const;

private:
    int n_;
    std::vector<cplx> data_;
};

/// Field at n = 0: phi at the origin.
AmplitudeField initial_field(const InitialState& phi);

/// One walk step: out(x,y) = P in(x+1,y) + Q in(x-1,y) + R in(x,y+1) +
/// S in(x,y-1). Allocates the time n+1 field.
AmplitudeField step(const FieldView& in, const DirectionRows& rows, int threads = 1);

struct EvolveOptions {
    int threads = 1;
    std::size_t memory_cap_bytes = std::size_t{4} << 30;
};

/// n steps from phi. Internally double-buffered on two preallocated arrays
/// (bitwise identical to iterating step()). Throws ResourceLimit before
/// allocating if the two buffers would exceed memory_cap_bytes.
AmplitudeField evolve(const CoinParameters& coin, const InitialState& phi, int n,
                      const EvolveOptions& opts = {});

/// Incremental engine behind evolve(), exposed for per-step analysis loops.
class Walker {
public:
    Walker(const CoinParameters& coin, const InitialState& phi, int n_max,
           const EvolveOptions& opts = {});

    void advance();
    int time() const { return t_; }
    int horizon() const { return n_max_; }
    FieldView field() const;
    AmplitudeField snapshot() const;

private:
    DirectionRows rows_;
    int n_max_, t_;
    int stride_;
    int threads_;
    std::vector<cplx> buf_[2];
    int cur_ = 0;
};

/// Exact field by brute-force path summation, for n <= 8 (else TooLarge).
/// classes maps direction counts (p, q, r, s), p+q+r+s = n, to the summed
/// operator product over all orderings; the field value at
/// (x, y) = (q - p, s - r) is that operator applied to phi.
struct PathSumOracle {
    int n = 0;
    std::map<std::array<int, 4>, Mat4> classes;

    AmplitudeField field(const InitialState& phi) const;
};

PathSumOracle path_sum_oracle(const CoinParameters& coin, int n);

/// Position distribution p(x, y) = |Psi(x, y)|^2 over the square |x|,|y| <= n.
struct ProbabilityGrid {
    int n = 0;
    std::vector<double> p; // (2n+1)^2 row major

    double at(int x, int y) const {
        return p[static_cast<std::size_t>(x + n) * (2 * n + 1) + (y + n)];
    }
};

ProbabilityGrid distribution(const FieldView& field);

} // namespace qwalk
