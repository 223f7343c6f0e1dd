#include "qwalk2d/evolution.hpp"

#include "qwalk2d/errors.hpp"
#include "qwalk2d/threads.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace qwalk {

namespace {

inline cplx row_dot(const Vec4& row, const cplx* v) {
    return row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
}

/// Writes the time n+1 field (diamond |x| + |y| <= n + 1, parity sites) into
/// an output grid that must hold zeros at every other parity-valid site it
/// covers. Reads outside |x|, |y| <= in.n count as zero.
void step_into(const FieldView& in, cplx* out_origin, int out_stride,
               const DirectionRows& rows, int threads) {
    const int m = in.n + 1;
    auto run = [&](int xlo, int xhi) {
        for (int xi = xlo; xi < xhi; ++xi) {
            const int x = xi - m;
            const int ylim = m - std::abs(x);
            const bool xp_ok = x + 1 <= in.n && x + 1 >= -in.n;
            const bool xm_ok = x - 1 <= in.n && x - 1 >= -in.n;
            cplx* out_row = out_origin + 4 * static_cast<std::ptrdiff_t>(x) * out_stride;
            for (int y = -ylim; y <= ylim; y += 2) {
                cplx* o = out_row + 4 * static_cast<std::ptrdiff_t>(y);
                const bool y_ok = y <= in.n && y >= -in.n;
                o[0] = (xp_ok && y_ok) ? row_dot(rows.p, in.at(x + 1, y)) : cplx{};
                o[1] = (xm_ok && y_ok) ? row_dot(rows.q, in.at(x - 1, y)) : cplx{};
                o[2] = (y + 1 <= in.n && std::abs(x) <= in.n) ? row_dot(rows.r, in.at(x, y + 1)) : cplx{};
                o[3] = (y - 1 >= -in.n && std::abs(x) <= in.n) ? row_dot(rows.s, in.at(x, y - 1)) : cplx{};
            }
        }
    };
    parallel_blocks(0, 2 * m + 1, threads, run);
}

std::size_t field_bytes(int n) {
    const std::size_t ext = 2 * static_cast<std::size_t>(n) + 1;
    return ext * ext * 4 * sizeof(cplx);
}

} // namespace

InitialState make_initial_state(cplx alpha, cplx beta, cplx gamma, cplx lambda) {
    const double norm =
        std::norm(alpha) + std::norm(beta) + std::norm(gamma) + std::norm(lambda);
    if (std::abs(norm - 1.0) > 1e-10)
        throw NotNormalized("|phi|^2 = " + std::to_string(norm) + ", expected 1");
    return InitialState{alpha, beta, gamma, lambda};
}

AmplitudeField::AmplitudeField(int n) : n_(n) {
    const std::size_t ext = 2 * static_cast<std::size_t>(n) + 1;
    data_.assign(ext * ext * 4, cplx{});
}

double AmplitudeField::norm_sq() const {
    const FieldView v = view();
    std::vector<double> rows(static_cast<std::size_t>(2 * n_ + 1), 0.0);
    for (int x = -n_; x <= n_; ++x) {
        double acc = 0.0;
        const int ylim = n_ - std::abs(x);
        for (int y = -ylim; y <= ylim; y += 2) {
            const cplx* a = v.at(x, y);
            acc += std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]) + std::norm(a[3]);
        }
        rows[static_cast<std::size_t>(x + n_)] = acc;
    }
    return tree_reduce(rows, [](double p, double q) { return p + q; });
}

AmplitudeField initial_field(const InitialState& phi) {
    AmplitudeField f(0);
    cplx* o = f.at(0, 0);
    o[0] = phi.alpha;
    o[1] = phi.beta;
    o[2] = phi.gamma;
    o[3] = phi.lambda;
    return f;
}

AmplitudeField step(const FieldView& in, const DirectionRows& rows, int threads) {
    AmplitudeField out(in.n + 1);
    const FieldView ov = out.view();
    step_into(in, const_cast<cplx*>(ov.origin), ov.stride, rows, threads);
    return out;
}

Walker::Walker(const CoinParameters& coin, const InitialState& phi, int n_max,
               const EvolveOptions& opts)
    : rows_(split_directions(tensor_square(coin))),
      n_max_(n_max),
      t_(0),
      stride_(2 * n_max + 1),
      threads_(opts.threads) {
    if (n_max < 0) throw OutOfRange("negative horizon");
    const std::size_t need = 2 * field_bytes(n_max);
    if (need > opts.memory_cap_bytes)
        throw ResourceLimit("evolution to n = " + std::to_string(n_max) + " needs " +
                            std::to_string(need) + " bytes, cap is " +
                            std::to_string(opts.memory_cap_bytes));
    const std::size_t cells = static_cast<std::size_t>(stride_) * stride_ * 4;
    buf_[0].assign(cells, cplx{});
    buf_[1].assign(cells, cplx{});
    cplx* center = buf_[0].data() + 4 * (static_cast<std::ptrdiff_t>(n_max) * stride_ + n_max);
    center[0] = phi.alpha;
    center[1] = phi.beta;
    center[2] = phi.gamma;
    center[3] = phi.lambda;
}

FieldView Walker::field() const {
    const cplx* origin =
        buf_[cur_].data() + 4 * (static_cast<std::ptrdiff_t>(n_max_) * stride_ + n_max_);
    return {t_, stride_, origin};
}

void Walker::advance() {
    if (t_ >= n_max_) throw OutOfRange("walker already at its horizon");
    cplx* out_origin =
        buf_[1 - cur_].data() + 4 * (static_cast<std::ptrdiff_t>(n_max_) * stride_ + n_max_);
    step_into(field(), out_origin, stride_, rows_, threads_);
    cur_ = 1 - cur_;
    ++t_;
}

AmplitudeField Walker::snapshot() const {
    AmplitudeField out(t_);
    const FieldView src = field();
    for (int x = -t_; x <= t_; ++x) {
        const int ylim = t_ - std::abs(x);
        for (int y = -ylim; y <= ylim; y += 2) {
            const cplx* a = src.at(x, y);
            cplx* o = out.at(x, y);
            for (int cmp = 0; cmp < 4; ++cmp) o[cmp] = a[cmp];
        }
    }
    return out;
}

AmplitudeField evolve(const CoinParameters& coin, const InitialState& phi, int n,
                      const EvolveOptions& opts) {
    Walker w(coin, phi, n, opts);
    for (int i = 0; i < n; ++i) w.advance();
    return w.snapshot();
}

PathSumOracle path_sum_oracle(const CoinParameters& coin, int n) {
    if (n < 0) throw OutOfRange("negative time");
    if (n > 8) throw TooLarge("path summation capped at n = 8, got " + std::to_string(n));

    const DirectionRows rows = split_directions(tensor_square(coin));
    const Mat4 mats[4] = {direction_matrix(rows, 0), direction_matrix(rows, 1),
                          direction_matrix(rows, 2), direction_matrix(rows, 3)};

    PathSumOracle oracle;
    oracle.n = n;

    struct Rec {
        const Mat4* mats;
        PathSumOracle* out;
        int n;
        void go(int depth, const Mat4& prod, std::array<int, 4> counts) {
            if (depth == n) {
                auto [it, fresh] = out->classes.try_emplace(counts, prod);
                if (!fresh) it->second = it->second + prod;
                return;
            }
            for (int d = 0; d < 4; ++d) {
                auto next = counts;
                ++next[static_cast<std::size_t>(d)];
                go(depth + 1, mats[d] * prod, next);
            }
        }
    } rec{mats, &oracle, n};
    rec.go(0, Mat4::identity(), {0, 0, 0, 0});
    return oracle;
}

AmplitudeField PathSumOracle::field(const InitialState& phi) const {
    AmplitudeField out(n);
    const Vec4 v0{phi.alpha, phi.beta, phi.gamma, phi.lambda};
    for (const auto& [counts, prod] : classes) {
        const int x = counts[1] - counts[0];
        const int y = counts[3] - counts[2];
        const Vec4 v = prod * v0;
        cplx* o = out.at(x, y);
        for (int cmp = 0; cmp < 4; ++cmp) o[cmp] += v[cmp];
    }
    return out;
}

ProbabilityGrid distribution(const FieldView& field) {
    const int n = field.n;
    ProbabilityGrid grid;
    grid.n = n;
    grid.p.assign(static_cast<std::size_t>(2 * n + 1) * (2 * n + 1), 0.0);
    for (int x = -n; x <= n; ++x) {
        const int ylim = n - std::abs(x);
        for (int y = -ylim; y <= ylim; y += 2) {
            const cplx* a = field.at(x, y);
            grid.p[static_cast<std::size_t>(x + n) * (2 * n + 1) + (y + n)] =
                std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]) + std::norm(a[3]);
        }
    }
    return grid;
}

} // namespace qwalk
