#include "schrodlab/error.hpp"
#include "schrodlab/exponents.hpp"
#include "schrodlab/potential.hpp"

#include <doctest.h>

#include <cmath>

using namespace schrodlab;

namespace {

// h(m,n,k) = (m-2)/(2(m-1)) + (m-k)(n-1)/(k(m-1)), evaluated directly
double h_formula(int m, int n, int k) {
    return (m - 2.0) / (2.0 * (m - 1)) + (m - k) * (n - 1.0) / (k * (m - 1.0));
}

double q_formula(double tau, double p) {
    double tc = tau / (tau - 1), pc = p == 1.0 ? INFINITY : p / (p - 1);
    return 1.0 / (1.0 / (tau * p) + 1.0 / (tc * pc));
}

} // namespace

TEST_SUITE("exponents") {

TEST_CASE("worked tables") {
    auto a = compute_table(4, 2, 2, 1.0);
    CHECK(a.h == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(a.tau == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(a.h_exact.num == 2);
    CHECK(a.h_exact.den == 3);
    auto b = compute_table(4, 2, 4, 1.0);
    CHECK(b.h == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(b.tau == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(b.tau_conj == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(b.q == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(b.I_p.bracket() == "(6.0, inf]");
    CHECK(compute_table(6, 3, 4, 2.0).q == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sweep against direct formulas") {
    for (int m : {4, 6, 8})
        for (int n : {2, 3, 4}) {
            double prev = INFINITY;
            for (int k = 2; k <= m; ++k) {
                auto t = compute_table(m, n, k, 1.0);
                double h = h_formula(m, n, k);
                CHECK(t.h == doctest::Approx(h).epsilon(1e-14));
                CHECK(t.tau == doctest::Approx(n / h).epsilon(1e-14));
                CHECK(t.tau > 2.0);
                CHECK(t.tau <= 3.0 * n + 1e-14);
                CHECK(t.tau >= 2.0 * (m - 1) / (m - 2) - 1e-14);
                CHECK(t.tau <= 2.0 * n * (m - 1) / (m - 2) + 1e-14);
                CHECK(t.h < prev);
                prev = t.h;
                for (double p : {1.0, 1.25, 1.5, 1.75}) {
                    auto tp = compute_table(m, n, k, p);
                    CHECK(tp.q == doctest::Approx(q_formula(tp.tau, p)).epsilon(1e-14));
                    CHECK(tp.q > 2.0);
                    CHECK(tp.q < tp.p_conj);
                    CHECK_FALSE(tp.I_p.empty);
                    // p' always lies in I_p
                    CHECK(tp.I_p.contains(tp.p_conj));
                }
            }
        }
}

TEST_CASE("p = 2 intervals") {
    auto t = compute_table(6, 3, 3, 2.0);
    CHECK(t.I_p.bracket() == "{2.0}");
    CHECK(t.I_prime_p.bracket() == "{inf}");
}

TEST_CASE("interval branches") {
    // (4,2,2): tau = 3, tau' = 3/2
    auto t = compute_table(4, 2, 2, 1.75);
    CHECK(t.I_p.lower == doctest::Approx(2.1).epsilon(1e-14));
    CHECK(t.I_p.upper == doctest::Approx(1.75 * 0.5 / 0.25).epsilon(1e-14));
    CHECK_FALSE(t.I_p.lower_closed);
    CHECK(compute_table(4, 2, 2, 1.0).I_prime_p.bracket() == "[1.0, 1.5)");
    // boundary p = tau': upper endpoint read as the limit
    auto b = compute_table(4, 2, 2, 1.5);
    CHECK(std::isinf(b.I_p.upper));
    CHECK_FALSE(b.I_p.note.empty());
}

TEST_CASE("potential intervals above p = 2") {
    auto t = compute_table(4, 2, 2, 2.0);
    auto s = admissible_s(t, 3.0);
    CHECK_FALSE(s.empty);
    CHECK(s.kind == Interval::Kind::s_range_dual);
    CHECK(admissible_s(t, 3.5).empty); // p = 2 + tau'
    CHECK(admissible_s(t, 5.0).empty);
}

TEST_CASE("n_p duality") {
    for (int n : {2, 3, 4})
        for (double p : {1.0, 1.25, 1.5, 1.75}) CHECK(n_p(n, p) == doctest::Approx(n_p(n, conjugate_exponent(p))).epsilon(1e-14));
}

TEST_CASE("decay exponents") {
    auto t = compute_table(4, 2, 2, 1.0);
    CHECK(dispersive_exponent(t, 1.0, INFINITY) == doctest::Approx(-0.5));
    CHECK(resolvent_exponent(t, 1.0, INFINITY) == doctest::Approx(-0.5));
    auto t2 = compute_table(4, 2, 2, 2.0);
    CHECK(dispersive_exponent(t2, 2.0, 2.0) == 0.0);
    auto t3 = compute_table(4, 2, 2, 1.25);
    CHECK(dispersive_exponent(t3, 1.25, 5.0) == doctest::Approx(0.5 * (1 - 2 / 1.25)));
    CHECK_THROWS_AS(dispersive_exponent(t, 1.0, 2.0), PreconditionError);
}

TEST_CASE("q(tau, p) increases in tau") {
    for (double p : {1.0, 1.25, 1.5, 1.75}) {
        double prev = 0;
        for (double tau : {2.5, 3.0, 6.0, 12.0}) {
            double q = q_of(tau, p);
            CHECK(q > prev);
            prev = q;
        }
    }
}

TEST_CASE("comparison with the nondegenerate theory") {
    auto c = compare_nondegenerate(4, 2, 1.0);
    CHECK_FALSE(c.tau1_defined);
    CHECK_FALSE(c.h3_holds);
    auto d = compare_nondegenerate(4, 7, 1.0);
    REQUIRE(d.tau1_defined);
    CHECK(d.tau1 == doctest::Approx(2.0 * 7 * 3 / (28 - 14 - 12 + 2)));
    CHECK(d.proper_containment);
    CHECK(d.h3_holds);
}

TEST_CASE("admissibility gate worked cases") {
    auto t2 = compute_table(4, 2, 2, 2.0);
    auto a = admissibility_gate(2.0, INFINITY, INFINITY, t2);
    CHECK(a.admissible);
    auto t1 = compute_table(4, 2, 2, 1.0);
    auto b = admissibility_gate(1.0, 1.2, 1.2, t1);
    CHECK(b.admissible);
    CHECK(b.I_prime.bracket() == "[1.0, 1.5)");
    auto c = admissibility_gate(5.0, INFINITY, INFINITY, t2);
    CHECK_FALSE(c.admissible);
    CHECK(c.reason.find("empty") != std::string::npos);
    // 0.4 is below n/m = 1/2
    CHECK_FALSE(admissibility_gate(1.0, 1.0, 0.4, t1).admissible);
    CHECK(admissibility_gate(3.0, 3.5, 3.5, t2).dual_route);
}

TEST_CASE("out of range arguments") {
    CHECK_THROWS(compute_table(5, 2, 2, 1.0));
    CHECK_THROWS(compute_table(4, 2, 5, 1.0));
    CHECK_THROWS(compute_table(4, 2, 2, 2.5));
}

}
