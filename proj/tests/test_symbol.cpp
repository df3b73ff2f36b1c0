#include "common.hpp"

#include "schrodlab/error.hpp"

#include <doctest.h>

#include <random>

using namespace testing;

TEST_SUITE("symbol") {

TEST_CASE("evaluation and homogeneity") {
    auto P = sextic();
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
        Point x{g(rng), g(rng)};
        double s = 0.3 + std::abs(g(rng));
        Point sx{s * x[0], s * x[1]};
        CHECK(P.eval(sx) == doctest::Approx(std::pow(s, 6) * P.eval(x)).epsilon(1e-12));
        double direct = std::pow(x[0], 6) + 5 * x[0] * x[0] * std::pow(x[1], 4) + std::pow(x[1], 6);
        CHECK(P.eval(x) == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("Euler identity for the gradient") {
    auto P = circle4();
    Point x{0.7, -1.3};
    auto gr = P.gradient(x);
    CHECK(dot(gr, x) == doctest::Approx(4 * P.eval(x)).epsilon(1e-13));
}

TEST_CASE("directional derivatives match finite differences") {
    auto P = quartic_axes();
    Point xi{0.4, 0.9};
    Point eta{0.6, 0.8};
    auto f = [&](double s) { return P.eval({xi[0] + s * eta[0], xi[1] + s * eta[1]}); };
    double h = 1e-3;
    double d1 = (f(h) - f(-h)) / (2 * h);
    double d2 = (f(h) - 2 * f(0) + f(-h)) / (h * h);
    CHECK(P.directional_derivative(xi, eta, 1) == doctest::Approx(d1).epsilon(1e-6));
    CHECK(P.directional_derivative(xi, eta, 2) == doctest::Approx(d2).epsilon(1e-5));
    // (eta.grad)^4 of a quartic is 24 (eta1^4 + eta2^4)
    CHECK(P.directional_derivative(xi, eta, 4) == doctest::Approx(24 * (std::pow(0.6, 4) + std::pow(0.8, 4))));
    CHECK(P.directional_derivative(xi, eta, 5) == 0.0);
}

TEST_CASE("derivative table past the degree is zero") {
    auto P = circle4();
    CHECK(P.derivative({3, 2}).is_zero());
    CHECK_FALSE(P.derivative({2, 2}).is_zero());
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(PolySymbol(2, 3, {{{3, 0}, 1}}), Error);
    CHECK_THROWS_AS(PolySymbol(2, 4, {{{3, 0}, 1}}), Error);
    CHECK_THROWS_AS(PolySymbol(2, 4, {{{4, 0, 0}, 1}}), DimensionError);
    CHECK_THROWS_AS(circle4().eval({1.0}), DimensionError);
}

TEST_CASE("ellipticity and sign normalization") {
    CHECK(check_elliptic(circle4()).elliptic);
    CHECK(check_elliptic(nonconvex()).elliptic);
    PolySymbol indefinite(2, 4, {{{4, 0}, 1}, {{0, 4}, -1}});
    CHECK_FALSE(check_elliptic(indefinite).elliptic);
    bool flipped = false;
    auto Q = normalize_sign(circle4().negated(), &flipped);
    CHECK(flipped);
    CHECK(Q.eval({1.0, 2.0}) == doctest::Approx(25.0));
}

TEST_CASE("sphere samples are unit vectors") {
    for (int n : {2, 3, 4})
        for (const auto& w : sphere_samples(n, 64)) CHECK(norm2(w) == doctest::Approx(1.0).epsilon(1e-14));
}

}
