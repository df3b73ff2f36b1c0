#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace schrodlab {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    static Rational make(std::int64_t num, std::int64_t den);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct Interval {
    enum class Kind { q_range, s_range, s_range_dual };
    Kind kind = Kind::q_range;
    double lower = 0.0;
    double upper = 0.0;
    bool lower_closed = false;
    bool upper_closed = false;
    bool empty = false;
    std::string note; // boundary interpretation or derivation route

    static Interval none(Kind kind, std::string note = {});
    static Interval point(Kind kind, double x);
    bool singleton() const { return !empty && lower == upper; }
    bool contains(double x) const;
    Interval intersect(const Interval& other) const;
    // "(6.0, inf]", "{2.0}", "empty"
    std::string bracket() const;
};

std::string format_number(double x);

struct ExponentTable {
    int m = 0, n = 0, k = 0;
    Rational h_exact;
    Rational tau_exact;
    Rational tau_conj_exact;
    double h = 0.0;
    double tau = 0.0;
    double tau_conj = 0.0;
    double p = 1.0;
    double p_conj = kInf;
    double q = 0.0; // q(p)
    double n_p = 0.0;
    double beta_free = 0.0;      // integrated-group threshold, free case
    double beta_potential = 0.0; // threshold with a potential
    Interval I_p;
    Interval I_prime_p;
};

double conjugate_exponent(double p);
// n |1/2 - 1/p|
double n_p(int n, double p);
// 1/q = 1/(tau p) + 1/(tau' p')
double q_of(double tau, double p);

Rational h_exact(int m, int n, int k);

ExponentTable compute_table(int m, int n, int k, double p);

Interval admissible_q(const ExponentTable& t, double p);
Interval admissible_q_tau(double tau, double p);
Interval admissible_s(const ExponentTable& t, double p);
Interval admissible_s_tau(double tau, double p);

// (n/m)(1/q - 1/p); throws PreconditionError if q is not in I_p.
double dispersive_exponent(const ExponentTable& t, double p, double q);
// (n/m)(1/p - 1/q) - 1; also requires 1/p - 1/q < m/n.
double resolvent_exponent(const ExponentTable& t, double p, double q);

struct NondegenerateComparison {
    int m = 0, n = 0;
    double p = 1.0;
    double tau0 = 0.0;
    bool tau1_defined = false;
    double tau1 = 0.0;
    Interval I_tau0;
    Interval other;              // (q(tau1,p), p']
    bool proper_containment = false;
    bool h3_holds = false;       // n > 3 + 4/(m-2)
    double p_lower = 0.0;        // I'_p(tau0) meets (n/m, inf] iff p > 2n/(n+2m-2)
    std::string note;
};

NondegenerateComparison compare_nondegenerate(int m, int n, double p);

// Specialization: 1 <= p <= 3, n_p < m/2, V in L^{p/|p-2|}.
struct SpecialPotentialCheck {
    bool applicable = false;
    double s = 0.0;
    bool s_admissible = false;
    double beta_threshold = 0.0;
    std::string reason;
};

SpecialPotentialCheck special_potential_check(const ExponentTable& t, double p);

} // namespace schrodlab
