#include "common.hpp"

#include "schrodlab/error.hpp"
#include "schrodlab/kernel.hpp"

#include <doctest.h>

#include <cmath>

using namespace testing;

namespace {

// F^{-1}(e^{i|xi|^4})(x) in two dimensions from the Hankel form
// (2 pi)^{-1} int_0^inf e^{i rho^4} J0(rho r) rho d rho, expanding J0 and
// integrating each power of rho exactly.
std::complex<long double> circle_kernel_series(long double r) {
    const long double pi = 3.141592653589793238462643383279502884L;
    std::complex<long double> sum = 0;
    long double fact = 1; // j!
    for (int j = 0; j < 120; ++j) {
        if (j) fact *= j;
        long double s = (j + 1) / 2.0L;
        long double mag = std::pow(r / 2, 2.0L * j) / (fact * fact) * std::tgamma(s) / 4;
        std::complex<long double> phase = std::polar(1.0L, pi * s / 2);
        sum += (j % 2 ? -mag : mag) * phase;
    }
    return sum / (2 * pi);
}

} // namespace

TEST_SUITE("kernel") {

TEST_CASE("cutoff profile") {
    CHECK(cutoff_smoothstep(1.0) == 0.0);
    CHECK(cutoff_smoothstep(2.0) == 1.0);
    CHECK(cutoff_smoothstep(0.5) == 0.0);
    CHECK(cutoff_smoothstep(3.0) == 1.0);
    double prev = 0;
    for (double t = 1.0; t <= 2.0; t += 0.01) {
        CHECK(cutoff_smoothstep(t) >= prev);
        prev = cutoff_smoothstep(t);
    }
    // flat to fourth order at the ends
    double h = 1e-2;
    CHECK(cutoff_smoothstep(1 + h) < 1e-7);
    CHECK(1 - cutoff_smoothstep(2 - h) < 1e-7);
}

TEST_CASE("radial factor against its power series") {
    for (int n : {2, 3})
        for (int m : {4, 6})
            for (double b : {0.0, 0.3, -1.1, 2.0}) {
                auto v = radial_factor(n, m, b, CutoffMode::Full);
                auto s = radial_factor_series(n, m, b);
                CHECK(std::abs(v.value - s) < 1e-10 * std::max(1.0, std::abs(s)));
            }
}

TEST_CASE("surface kernel matches the Hankel series for the circle") {
    auto P = circle4();
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        auto k = eval_kernel_surface(P, {r * std::cos(0.3), r * std::sin(0.3)});
        auto ref = circle_kernel_series(r);
        cplx want(static_cast<double>(ref.real()), static_cast<double>(ref.imag()));
        CHECK_FALSE(k.flagged);
        CHECK(std::abs(k.value - want) < 1e-9);
    }
}

TEST_CASE("FFT kernel matches the Hankel series") {
    auto P = circle4();
    auto f = eval_kernel_fft(P, 2048, 512, 1.0, {2.5, 4.0});
    for (double r : {1.0, 2.0, 3.0}) {
        auto ref = circle_kernel_series(r);
        cplx want(static_cast<double>(ref.real()), static_cast<double>(ref.imag()));
        CHECK(std::abs(interpolate_field(f, {r, 0.0}) - want) < 1e-6);
    }
    CHECK(f.plancherel_error < 1e-10);
}

TEST_CASE("kernel symmetries") {
    auto P = sextic();
    auto a = eval_kernel_surface(P, {1.5, 0.7}).value;
    auto b = eval_kernel_surface(P, {-1.5, -0.7}).value;
    auto c = eval_kernel_surface(P, {1.5, -0.7}).value;
    CHECK(std::abs(a - b) < 1e-10);
    CHECK(std::abs(a - c) < 1e-10);
    auto Q = quartic_axes();
    CHECK(std::abs(eval_kernel_surface(Q, {2.0, 0.5}).value - eval_kernel_surface(Q, {0.5, 2.0}).value) < 1e-10);
}

TEST_CASE("epsilon diagnostics approach the contour value") {
    KernelOptions o;
    o.eps_diagnostics = true;
    auto k = eval_kernel_surface(circle4(), {3.0, 0.0}, o);
    CHECK_THROWS_AS(eval_kernel_surface(circle4(), {0.0, 0.0}), PreconditionError);
    REQUIRE(k.eps_values.size() == o.eps_schedule.size());
    // distance to the limit shrinks along the schedule
    CHECK(std::abs(k.eps_values.back() - k.value) < std::abs(k.eps_values.front() - k.value));
}

TEST_CASE("decay exponent of the circle kernel") {
    auto d = fit_decay(circle4(), 2, dyadic_ladder(8, 256), circle_directions(4), 0.1);
    CHECK(d.fit.slope <= -2.0 / 3.0 + 0.1);
    CHECK(d.fit.slope == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
}

TEST_CASE("ladder and directions") {
    auto l = dyadic_ladder(8, 256);
    CHECK(l.size() == 6);
    CHECK(l.front() == 8);
    CHECK(l.back() == 256);
    auto d = circle_directions(8);
    CHECK(d[2][0] == 0.0);
    CHECK(d[2][1] == 1.0);
}

}
