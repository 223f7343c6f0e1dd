#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qwalk2d/asymptotics.hpp"
#include "qwalk2d/coin.hpp"
#include "qwalk2d/entropy.hpp"
#include "qwalk2d/errors.hpp"
#include "qwalk2d/evolution.hpp"
#include "qwalk2d/hermitian.hpp"
#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace qwalk;

namespace {

constexpr double kPi = std::numbers::pi;

const CoinParameters kHadamard = coin_from_angle(kPi / 4);
const CoinParameters kThird = coin_from_angle(kPi / 3);
const CoinParameters kSkew =
    build_coin(std::polar(0.6, 0.3), std::polar(0.8, -1.1), std::polar(1.0, 0.7));
const InitialState kLeft = make_initial_state(1, 0, 0, 0);
const InitialState kSym = make_initial_state(0.5, cplx(0, 0.5), cplx(0, 0.5), -0.5);

Mat4 walk_operator_at(const CoinParameters& coin, double kx, double ky) {
    const Mat4 t = tensor_square(coin);
    Mat4 shift;
    shift(0, 0) = std::polar(1.0, kx);
    shift(1, 1) = std::polar(1.0, -kx);
    shift(2, 2) = std::polar(1.0, ky);
    shift(3, 3) = std::polar(1.0, -ky);
    return shift * t;
}

double min_eigenphase_gap(const Mat4& w) {
    const Eigensystem4 sys = unitary_eigensystem(w);
    std::array<double, 4> ph;
    for (int i = 0; i < 4; ++i) ph[i] = std::arg(sys.values[i]);
    std::sort(ph.begin(), ph.end());
    double gap = 2 * kPi - (ph[3] - ph[0]);
    for (int i = 0; i < 3; ++i) gap = std::min(gap, ph[i + 1] - ph[i]);
    return gap;
}

} // namespace

TEST_CASE("weight coefficients are the one-step displaced amplitudes") {
    std::mt19937 rng(51u);
    for (int trial = 0; trial < 6; ++trial) {
        const CoinParameters coin = sampling::coin(rng);
        const InitialState phi = sampling::state(rng);
        const WeightCoefficients w = weight_coefficients(coin, phi);
        const AmplitudeField f = evolve(coin, phi, 1);
        CHECK(std::abs(w.A - f.at(-1, 0)[0]) < 1e-15);
        CHECK(std::abs(w.B - f.at(1, 0)[1]) < 1e-15);
        CHECK(std::abs(w.C - f.at(0, -1)[2]) < 1e-15);
        CHECK(std::abs(w.D - f.at(0, 1)[3]) < 1e-15);
    }
    CHECK_THROWS_AS(weight_coefficients(build_coin(1.0, 0.0, 1.0), kLeft), DegenerateCoin);
}

TEST_CASE("make_grid uses |a|^2 as the box half-width") {
    CHECK(make_grid(kHadamard, 64).c1 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(make_grid(kThird, 64).c1 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(make_grid(kSkew, 64).c2 == doctest::Approx(0.36).epsilon(1e-14));
    CHECK_THROWS_AS(make_grid(kHadamard, 7), OutOfRange);
}

TEST_CASE("chebyshev rule integrates its exact units") {
    const QuadratureGrid grid = make_grid(kHadamard, 64);
    const double unit =
        chebyshev_quadrature2d([](double, double) { return 1.0; }, grid);
    CHECK(std::abs(unit - kPi * kPi) < 1e-12);

    const double quartic =
        chebyshev_quadrature2d([](double x, double y) { return x * x * y * y; }, grid);
    CHECK(std::abs(quartic - grid.c1 * grid.c1 * grid.c2 * grid.c2 * kPi * kPi / 4) < 1e-14);
}

TEST_CASE("chebyshev rule is doubling-stable on smooth integrands") {
    auto g = [](double x, double y) { return std::exp(x) * std::cos(3 * y) + 2.0; };
    const double coarse = chebyshev_quadrature2d(g, make_grid(kHadamard, 128));
    const double fine = chebyshev_quadrature2d(g, make_grid(kHadamard, 256));
    CHECK(std::abs(coarse - fine) < 1e-8);
}

TEST_CASE("printed literal transcription at the origin") {
    const WeightCoefficients w = weight_coefficients(kHadamard, kLeft);
    const double h0 =
        weight_h(0, 0.0, 0.0, w, kHadamard, Transcription::printed_literal);
    CHECK(h0 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("spectral weights reproduce the limiting density diagonal") {
    const QuadratureGrid grid = make_grid(kHadamard, 64);
    const WeightCoefficients w = weight_coefficients(kHadamard, kLeft);
    const Mat4 rho = limiting_density_matrix(kHadamard, kLeft, grid);
    for (int d = 0; d < 4; ++d) {
        const double via_weight =
            chebyshev_quadrature2d(
                [&](double x, double y) { return weight_h(d, x, y, w, kHadamard); }, grid) /
            (4 * kPi * kPi);
        CHECK(std::abs(via_weight - rho(d, d).real()) < 1e-10);
    }
}

TEST_CASE("limiting density for the left-started Hadamard walk") {
    const QuadratureGrid grid = make_grid(kHadamard, 256);
    const Mat4 rho = limiting_density_matrix(kHadamard, kLeft, grid);
    const double want[4] = {0.39996688, 0.19817683, 0.20644995, 0.19540633};
    for (int d = 0; d < 4; ++d)
        CHECK(rho(d, d).real() == doctest::Approx(want[d]).epsilon(2e-6));
    CHECK(hermiticity_defect(rho) < 1e-12);

    // one Richardson step lands on the closed-form time average
    const Mat4 ex = limiting_density_extrapolated(kHadamard, kLeft, make_grid(kHadamard, 512));
    const double gold[4] = {0.399975398460, 0.198167701484, 0.206441126359, 0.195415773696};
    double trace_diag = 0.0;
    for (int d = 0; d < 4; ++d) {
        CHECK(std::abs(ex(d, d).real() - gold[d]) < 2e-5);
        trace_diag += ex(d, d).real();
    }
    CHECK(std::abs(trace_diag - 1.0) < 1e-6);
}

TEST_CASE("closed-form time average agrees with the projector quadrature") {
    const Mat4 fj = fejer_density_matrix(kHadamard, kLeft, 128, 513);
    const Mat4 ex = limiting_density_extrapolated(kHadamard, kLeft, make_grid(kHadamard, 512));
    for (int d = 0; d < 4; ++d)
        CHECK(std::abs(fj(d, d).real() - ex(d, d).real()) < 1e-3);
}

TEST_CASE("T=1 time average is exact against the two-step walk") {
    // the average of rho_n over n in (1, 2] is just rho_2
    const Mat4 fj = fejer_density_matrix(kHadamard, kLeft, 1, 8);
    const Mat4 rho2 = coin_density(evolve(kHadamard, kLeft, 2).view());
    CHECK(max_abs_diff(fj, rho2) < 1e-12);
}

TEST_CASE("band degeneracies are genuine eigenphase crossings") {
    const auto apex_h4 = band_degeneracies(kHadamard);
    CHECK(apex_h4.size() == 4);
    const auto apex_p3 = band_degeneracies(kThird);
    CHECK(apex_p3.size() == 4);
    const auto apex_k3 = band_degeneracies(kSkew);
    CHECK(apex_k3.size() == 8);

    for (const auto& list : {apex_h4, apex_p3, apex_k3}) {
        const CoinParameters& coin = (&list == &apex_h4)   ? kHadamard
                                     : (&list == &apex_p3) ? kThird
                                                           : kSkew;
        for (const auto& k : list)
            CHECK(min_eigenphase_gap(walk_operator_at(coin, k[0], k[1])) < 1e-9);
        // a generic interior point has a healthy gap
        CHECK(min_eigenphase_gap(walk_operator_at(coin, 0.37, 1.11)) > 1e-3);
    }
}

TEST_CASE("empirical_limit recovers the limit of a damped oscillation") {
    std::vector<double> series;
    for (int n = 1; n <= 400; ++n)
        series.push_back(1.5 + 0.3 * std::cos(0.8 * n) / n);
    const EmpiricalLimit lim = empirical_limit(series);
    CHECK(std::abs(lim.estimate - 1.5) < 10.0 / 400);
    CHECK(lim.oscillation < 10.0 / 400);

    std::vector<double> tiny(31, 1.0);
    CHECK_THROWS_AS(empirical_limit(tiny), TooShort);
    CHECK_THROWS_AS(empirical_limit(series, 0.0), OutOfRange);
    CHECK_THROWS_AS(empirical_limit(series, 1.5), OutOfRange);
}

TEST_CASE("scaling_fit is exact on exactly logarithmic data") {
    std::vector<double> series;
    for (int n = 1; n <= 128; ++n) series.push_back(std::log2(static_cast<double>(n)) - 2.0);
    const ScalingFit fit = scaling_fit(series, 16, 128);
    CHECK(std::abs(fit.slope - 1.0) < 1e-12);
    CHECK(std::abs(fit.intercept + 2.0) < 1e-12);
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(scaling_fit(series, 8, 128), TooFewPoints);
    CHECK_THROWS_AS(scaling_fit(series, 100, 104), TooFewPoints);
}

TEST_CASE("correction integral closed forms") {
    const QuadratureGrid grid = make_grid(kHadamard, 256);

    const double unit = entropy_like_integral([](double, double) { return 1.0; }, grid);
    CHECK(std::abs(unit - 4 * kPi * kPi) < 1e-10);

    const double c = 0.3;
    const double j = entropy_like_integral([&](double, double) { return c; }, grid);
    const double want =
        c * kPi * kPi * (std::log2(c) - std::log2(grid.c1) - std::log2(grid.c2) + 2);
    CHECK(std::abs(j - want) < 1e-10);

    // g cancels the kernel: gK = k constant, integral k log2 k * area
    const QuadratureGrid fine = make_grid(kHadamard, 512);
    const double k = 1.0 / (4 * grid.c1 * grid.c2);
    const double prod = entropy_like_integral(
        [&](double x, double y) {
            return k * std::sqrt(grid.c1 * grid.c1 - x * x) *
                   std::sqrt(grid.c2 * grid.c2 - y * y);
        },
        fine);
    CHECK(std::abs(prod - k * std::log2(k) * 4 * grid.c1 * grid.c2) < 2e-5);

    // analytic g: doubling leaves no residual
    auto ga = [&](double x, double y) {
        return std::exp(std::sin(kPi * x / grid.c1)) * (2.0 + std::cos(kPi * y / grid.c2));
    };
    const double coarse = entropy_like_integral(ga, make_grid(kHadamard, 128));
    const double refined = entropy_like_integral(ga, grid);
    CHECK(std::abs(coarse - refined) < 1e-10);
}

TEST_CASE("shannon corrections for the left-started Hadamard walk") {
    const QuadratureGrid grid = make_grid(kHadamard, 256);
    const double left = shannon_correction_integral(0, kHadamard, kLeft, grid);
    CHECK(left == doctest::Approx(0.765537703777).epsilon(1e-6));
    const double total = shannon_correction_integral(4, kHadamard, kLeft, grid);
    CHECK(total == doctest::Approx(0.697007741055).epsilon(1e-6));
    CHECK_THROWS_AS(shannon_correction_integral(5, kHadamard, kLeft, grid), OutOfRange);
    CHECK_THROWS_AS(shannon_correction_integral(-1, kHadamard, kLeft, grid), OutOfRange);
}

TEST_CASE("limit_entanglement: quadrature path reports non-factorability") {
    CHECK_THROWS_AS(
        limit_entanglement(kHadamard, kLeft, LimitMethod::quadrature, {.quad_n = 128}),
        NotFactorable);
    const double se = limit_entanglement(kHadamard, kLeft, LimitMethod::empirical,
                                         {.horizon = 128, .threads = 2});
    CHECK(se > 1.7);
    CHECK(se < 1.95);
}

TEST_CASE("calibration selects the spectral transcription") {
    const std::vector<std::pair<CoinParameters, InitialState>> suite = {{kHadamard, kLeft},
                                                                        {kThird, kSym}};
    const CalibrationResult cal = calibrate_transcription(suite, 128, 128, 1e-2, 2);
    CHECK(cal.selected == Transcription::spectral);
    CHECK(cal.errata.size() == 3);
    CHECK_THROWS_AS(calibrate_transcription(suite, 128, 128, 1e-9, 2), CalibrationFailed);
}

TEST_CASE("entropy series freezes at early and mid horizons") {
    EvolveOptions eo;
    eo.threads = 2;
    Walker w(kHadamard, kLeft, 64, eo);
    for (int n = 1; n <= 64; ++n) {
        w.advance();
        if (n == 5) {
            const Mat4 rho = coin_density(w.field(), 2);
            CHECK(von_neumann_entropy(hermitian_eigenvalues(rho)) ==
                  doctest::Approx(1.8755469548386818).epsilon(1e-11));
            CHECK(shannon_entropy(distribution(w.field()), 2) ==
                  doctest::Approx(4.086057564934374).epsilon(1e-11));
            const ComponentStats cs = component_entropies(w.field());
            const double sw[4] = {3.3335546026169967, 2.7467883790915013,
                                  1.9054194586004516, 3.6578680960412124};
            for (int d = 0; d < 4; ++d)
                CHECK(cs.entropy[d] == doctest::Approx(sw[d]).epsilon(1e-11));
        }
        if (n == 64) {
            const Mat4 rho = coin_density(w.field(), 2);
            CHECK(von_neumann_entropy(hermitian_eigenvalues(rho)) ==
                  doctest::Approx(1.7489358964723563).epsilon(1e-11));
            CHECK(shannon_entropy(distribution(w.field()), 2) ==
                  doctest::Approx(9.959040034003486).epsilon(1e-11));
        }
    }
}

TEST_CASE("build_limit_report on a reduced budget") {
    ReportOptions opts;
    opts.n_max = 64;
    opts.quad_n = 64;
    opts.threads = 2;
    const LimitReport rep = build_limit_report(kHadamard, kLeft, opts);

    CHECK(rep.transcription_id == "spectral");
    CHECK(!rep.s_limit_quadrature.has_value());
    CHECK(rep.s_limit_empirical > 1.5);
    CHECK(rep.s_limit_empirical < 2.0);

    double quad_sum = 0.0, emp_sum = 0.0;
    for (int d = 0; d < 4; ++d) {
        quad_sum += rep.overlaps_quadrature[d];
        emp_sum += rep.overlaps_empirical[d];
        CHECK(std::abs(rep.overlaps_quadrature[d] - rep.overlaps_empirical[d]) < 5e-2);
    }
    CHECK(std::abs(quad_sum - 1.0) < 1e-6);
    CHECK(std::abs(emp_sum - 1.0) < 1e-6);

    CHECK(rep.entanglement_series.size() == 64);
    CHECK(rep.shannon_series.size() == 64);
    CHECK(!rep.discrepancies.empty());

    ReportOptions thin = opts;
    thin.n_max = 16;
    CHECK_THROWS_AS(build_limit_report(kHadamard, kLeft, thin), TooShort);
}
