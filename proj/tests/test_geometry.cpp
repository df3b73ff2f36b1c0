#include "common.hpp"

#include "schrodlab/geometry.hpp"

#include <doctest.h>

using namespace testing;

TEST_SUITE("geometry") {

TEST_CASE("surface points lie on P = 1") {
    for (const auto& P : {circle4(), quartic_axes(), sextic()})
        for (const auto& sp : sample_surface(P, 256)) CHECK(P.eval(sp.xi) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("finite type of the reference symbols") {
    auto a = detect_type(quartic_axes());
    auto b = detect_type(sextic());
    auto c = detect_type(circle4());
    REQUIRE(a.found);
    REQUIRE(b.found);
    REQUIRE(c.found);
    CHECK(a.k == 4);
    CHECK(b.k == 4);
    CHECK(c.k == 2);
}

TEST_CASE("convexity verdicts") {
    CHECK(check_convex(circle4()).convex);
    CHECK(check_convex(quartic_axes()).convex);
    CHECK(check_convex(sextic()).convex);
    auto nc = check_convex(nonconvex());
    CHECK_FALSE(nc.convex);
    REQUIRE(nc.witness);
    // the witness pair must violate the support inequality <n(xi), zeta - xi> <= 0
    const auto& [xi, zeta] = *nc.witness;
    auto g = nonconvex().gradient(xi);
    double s = (g[0] * (zeta[0] - xi[0]) + g[1] * (zeta[1] - xi[1])) / std::sqrt(dot(g, g));
    CHECK(s > 0.0);
}

TEST_CASE("unit circle has curvature one") {
    auto P = circle4();
    for (double th : {0.0, 0.4, 1.3, 2.9}) CHECK(gaussian_curvature(P, {std::cos(th), std::sin(th)}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("curvature of xi1^4 + xi2^4 vanishes on the axes only") {
    auto P = quartic_axes();
    CHECK(std::abs(gaussian_curvature(P, {1.0, 0.0})) < 1e-12);
    auto sp = surface_point(P, {std::sqrt(0.5), std::sqrt(0.5)});
    CHECK(gaussian_curvature(P, sp.xi) > 0.5);
}

TEST_CASE("Gauss map inverse returns support points") {
    auto P = sextic();
    for (double th : {0.1, 0.9, 2.2}) {
        Point eta{std::cos(th), std::sin(th)};
        auto s = gauss_map_inverse(P, eta);
        CHECK(s.normal_angle_error < 1e-8);
        CHECK(s.support_identity_error < 1e-8);
        // <eta, xi+> is the max over a dense sample
        double best = -1e9;
        for (const auto& sp : sample_surface(P, 4096)) best = std::max(best, dot(eta, sp.xi));
        CHECK(dot(eta, s.plus.xi) >= best - 1e-9);
        CHECK(dot(eta, s.minus.xi) == doctest::Approx(-dot(eta, s.plus.xi)).epsilon(1e-8)); // even symbol
    }
}

TEST_CASE("three-dimensional symbol") {
    PolySymbol P(3, 4, {{{4, 0, 0}, 1}, {{0, 4, 0}, 1}, {{0, 0, 4}, 1}});
    auto t = detect_type(P, 400);
    REQUIRE(t.found);
    CHECK(t.k == 4);
}

}
