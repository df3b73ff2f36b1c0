#include "common.hpp"

#include "schrodlab/error.hpp"
#include "schrodlab/potential.hpp"

#include <Eigen/Dense>
#include <doctest.h>

using namespace testing;

namespace {

// Dense matrix of f -> V R0(lambda) f on a small grid, built column by column.
Eigen::MatrixXcd dense_VR0(const PotentialSpec& V, cplx lambda) {
    const auto& g = V.grid;
    const size_t n = g->size();
    auto tot = V.total();
    Eigen::MatrixXcd A(n, n);
    for (size_t j = 0; j < n; ++j) {
        std::vector<cplx> e(n, 0.0);
        e[j] = 1.0;
        auto r = resolvent_apply(StateField(g, e), lambda);
        for (size_t i = 0; i < n; ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = tot[i] * r.values()[i];
    }
    return A;
}

StateField source(const GridPtr& g) {
    return StateField::from_function(g, [](const Point& x) {
        return cplx(1.0, 0.3 * x[0]) * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 8.0);
    });
}

} // namespace

TEST_SUITE("potential") {

TEST_CASE("zero potential reduces to the free operators") {
    auto g = grid(circle4(), 64, 32);
    auto V = gaussian_bump(g, 0.0, 2.0);
    CHECK(V.is_zero());
    auto f = source(g);
    auto b = born_resolvent(V, f, 2.0, 2.0, compute_table(4, 2, 2, 2.0));
    CHECK(distance(b.u, resolvent_apply(f, 2.0), 2) < 1e-14 * f.norm(2));
    auto u0 = gaussian(g, 3.0);
    auto e = evolve(V, u0, 1.0, 1.0 / 16);
    CHECK(distance(e.u, propagate(u0, 1.0), 2) < 1e-12 * u0.norm(2));
}

TEST_CASE("Born series agrees with the direct solve") {
    auto g = grid(circle4(), 128, 32);
    auto V = gaussian_bump(g, 0.1, 2.0);
    auto b = born_resolvent(V, source(g), 4.0, 2.0, compute_table(4, 2, 2, 2.0));
    CHECK(b.accepted);
    CHECK(b.gamma < 0.5);
    CHECK(b.residual < kBornResidual);
    CHECK(b.agreement < 1e-9);
    CHECK(b.direct_residual < 1e-12);
}

TEST_CASE("contraction estimate against dense operator norms") {
    auto g = grid(circle4(), 16, 8);
    auto V = gaussian_bump(g, cplx(0.8, 0.3), 1.5);
    cplx lam(1.0, 0.5);
    auto A = dense_VR0(V, lam);
    double col = A.cwiseAbs().colwise().sum().maxCoeff();
    auto c1 = contraction_estimate(V, lam, 1.0);
    CHECK(c1.gamma == doctest::Approx(col).epsilon(1e-10));
    double row = A.cwiseAbs().rowwise().sum().maxCoeff();
    auto ci = contraction_estimate(V, lam, INFINITY);
    CHECK(ci.gamma == doctest::Approx(row).epsilon(1e-10));
    double s2 = Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()(0);
    auto c2 = contraction_estimate(V, lam, 2.0);
    CHECK(c2.gamma <= s2 * (1 + 1e-9));
    CHECK(c2.gamma >= 0.95 * s2);
}

TEST_CASE("contraction decreases along a dyadic ladder") {
    auto g = grid(circle4(), 64, 32);
    auto V = gaussian_bump(g, 1.0, 2.0);
    double prev = INFINITY;
    for (double re : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        double gm = contraction_estimate(V, re, 1.0).gamma;
        CHECK(gm <= prev * 1.05);
        prev = gm;
    }
    auto om = find_omega(V, 1.0);
    CHECK(contraction_estimate(V, om.omega * 1.01, 1.0).gamma < 0.5);
}

TEST_CASE("Born refuses exactly when the gate rejects or gamma is too large") {
    auto g = grid(circle4(), 64, 32);
    auto f = source(g);
    auto t1 = compute_table(4, 2, 2, 1.0);
    // declared s = 1.6 lies outside I'_1 = [1, 1.5)
    auto bad = gaussian_bump(g, 0.1, 2.0, {}, 1.6);
    CHECK_FALSE(admissibility_gate(1.0, 1.6, 1.6, t1).admissible);
    CHECK_THROWS_AS(born_resolvent(bad, f, 4.0, 1.0, t1), PreconditionError);
    auto strong = gaussian_bump(g, 5.0, 2.0, {}, 1.2);
    REQUIRE(admissibility_gate(1.0, 1.2, 1.2, t1).admissible);
    REQUIRE(contraction_estimate(strong, 1.0, 1.0).gamma >= 0.5);
    try {
        born_resolvent(strong, f, 1.0, 1.0, t1);
        FAIL("expected a refusal");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("measured contraction") != std::string::npos);
        CHECK(std::string(e.what()).find("Re lambda") != std::string::npos);
    }
    auto fine = gaussian_bump(g, 0.1, 2.0, {}, 1.2);
    CHECK(born_resolvent(fine, f, 4.0, 1.0, t1).accepted);
}

TEST_CASE("Strang splitting is second order") {
    auto g = grid(circle4(), 128, 32);
    auto V = gaussian_bump(g, 1.0, 2.0);
    auto of = strang_order(V, gaussian(g, 2.0), 1.0, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
    CHECK(of.slope == doctest::Approx(2.0).epsilon(0.075));
}

TEST_CASE("Duhamel remainder scales like t^3") {
    auto g = grid(circle4(), 128, 32);
    auto V = gaussian_bump(g, 1.0, 2.0);
    auto d = duhamel_check(V, gaussian(g, 2.0), {0.2, 0.1, 0.05});
    CHECK(d.stabilized);
    CHECK(d.spread <= 2.0);
}

TEST_CASE("Gronwall envelopes") {
    auto g = grid(circle4(), 128, 32);
    auto u0 = StateField::from_function(g, [](const Point& x) { return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1]) / 32)); });
    // V = iW: the generator is skew-adjoint, the norm is conserved
    auto Vi = gaussian_bump(g, cplx(0.0, 0.5), 2.0);
    auto a = evolve(Vi, u0, 1.0, 1.0 / 256);
    CHECK(a.u.norm(2) == doctest::Approx(u0.norm(2)).epsilon(1e-11));
    // real V: growth at most e^{t sup Re V}
    auto Vr = gaussian_bump(g, 0.5, 2.0);
    auto b = evolve(Vr, u0, 1.0, 1.0 / 256);
    CHECK(b.u.norm(2) <= std::exp(Vr.sup_real()) * u0.norm(2));
    CHECK(b.u.norm(2) > u0.norm(2));
}

TEST_CASE("step doubling refuses coarse steps") {
    auto g = grid(circle4(), 128, 32);
    auto V = gaussian_bump(g, cplx(0.0, 0.5), 2.0);
    auto u0 = gaussian(g, 4.0);
    CHECK_THROWS_AS(evolve(V, u0, 1.0, 0.5), PreconditionError);
}

TEST_CASE("growth envelope") {
    auto P = circle4();
    auto g = grid(P, 256, 128);
    auto t2 = compute_table(4, 2, 2, 2.0);
    std::vector<Probe> probes{{"gauss_4", gaussian(g, 4.0)}, {"modulated", gaussian(g, 4.0, 0.5)}};
    std::vector<double> times{0, 1, 2, 3, 4, 5, 6, 7, 8};
    auto zero = growth_check(gaussian_bump(g, 0.0, 4.0), 2.0, 1.5, times, probes, t2, 1.0 / 64);
    CHECK(zero.finite);
    CHECK(std::abs(zero.omega_fit) < 0.02);
    auto bump = gaussian_bump(g, 0.1, 4.0);
    auto r = growth_check(bump, 2.0, 1.5, times, probes, t2, 1.0 / 64);
    CHECK(r.finite);
    CHECK(r.omega_fit <= bump.sup_real() + 0.05);
    CHECK_THROWS_AS(growth_check(bump, 2.0, 0.5, times, probes, t2), PreconditionError);
}

TEST_CASE("inverse power potentials are flagged singular") {
    auto g = grid(circle4(), 64, 16);
    auto V = inverse_power(g, 1.0, 0.5, 1.2, INFINITY);
    CHECK(V.singular);
    CHECK_FALSE(V.V1.empty());
    CHECK(discrete_norm(g, V.V2, INFINITY) <= 1.0 + 1e-12);
}

}
