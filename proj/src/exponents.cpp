#include "schrodlab/exponents.hpp"

#include "schrodlab/error.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

namespace schrodlab {

Rational Rational::make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {num, den};
}

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, r.ptr);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

Interval Interval::none(Kind kind, std::string note) {
    Interval i;
    i.kind = kind;
    i.empty = true;
    i.note = std::move(note);
    return i;
}

Interval Interval::point(Kind kind, double x) {
    Interval i;
    i.kind = kind;
    i.lower = i.upper = x;
    i.lower_closed = i.upper_closed = true;
    return i;
}

bool Interval::contains(double x) const {
    if (empty) return false;
    bool lo = lower_closed ? x >= lower : x > lower;
    bool hi = upper_closed ? x <= upper : x < upper;
    return lo && hi;
}

Interval Interval::intersect(const Interval& o) const {
    if (empty || o.empty) return none(kind, note);
    Interval r = *this;
    if (o.lower > r.lower || (o.lower == r.lower && !o.lower_closed)) {
        r.lower = o.lower;
        r.lower_closed = o.lower_closed;
    }
    if (o.upper < r.upper || (o.upper == r.upper && !o.upper_closed)) {
        r.upper = o.upper;
        r.upper_closed = o.upper_closed;
    }
    if (r.lower > r.upper || (r.lower == r.upper && !(r.lower_closed && r.upper_closed)))
        return none(kind, note);
    return r;
}

std::string Interval::bracket() const {
    if (empty) return "empty";
    if (singleton()) return "{" + format_number(lower) + "}";
    return std::string(lower_closed ? "[" : "(") + format_number(lower) + ", " +
           format_number(upper) + (upper_closed ? "]" : ")");
}

double conjugate_exponent(double p) {
    if (p == 1.0) return kInf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

double n_p(int n, double p) { return n * std::abs(0.5 - 1.0 / p); }

double q_of(double tau, double p) {
    double tc = tau / (tau - 1.0);
    double inv = 1.0 / (tau * p) + (1.0 - 1.0 / p) / tc;
    return 1.0 / inv;
}

Rational h_exact(int m, int n, int k) {
    // (m-2)/(2(m-1)) + (m-k)(n-1)/(k(m-1)) over the common denominator 2k(m-1)
    std::int64_t num = static_cast<std::int64_t>(m - 2) * k + 2LL * (m - k) * (n - 1);
    std::int64_t den = 2LL * k * (m - 1);
    return Rational::make(num, den);
}

namespace {

void check_args(int m, int n, int k) {
    if (m < 4 || m % 2 != 0) throw PreconditionError("exponents require even m >= 4");
    if (n < 2) throw PreconditionError("exponents require n >= 2");
    if (k < 2 || k > m) throw PreconditionError("type order k must lie in [2, m]");
}

} // namespace

Interval admissible_q_tau(double tau, double p) {
    using K = Interval::Kind;
    if (!(p >= 1.0 && p <= 2.0)) throw PreconditionError("admissible_q requires 1 <= p <= 2");
    double tc = tau / (tau - 1.0);
    if (p == 2.0) return Interval::point(K::q_range, 2.0);
    Interval i;
    i.kind = K::q_range;
    i.lower = q_of(tau, p);
    i.lower_closed = false;
    if (p < tc) {
        i.upper = kInf;
        i.upper_closed = true;
    } else if (p == tc) {
        i.upper = kInf;
        i.upper_closed = true;
        i.note = "boundary p = tau': upper endpoint taken as the limit +inf";
    } else {
        i.upper = p * (2.0 - tc) / (p - tc);
        i.upper_closed = false;
    }
    return i;
}

Interval admissible_q(const ExponentTable& t, double p) { return admissible_q_tau(t.tau, p); }

Interval admissible_s_tau(double tau, double p) {
    using K = Interval::Kind;
    if (!(p >= 1.0)) throw PreconditionError("admissible_s requires p >= 1");
    double tc = tau / (tau - 1.0);
    Interval i;
    if (p == 2.0) return Interval::point(K::s_range, kInf);
    if (p < 2.0) {
        i.kind = K::s_range;
        i.upper = tc * p / (2.0 - p);
        i.upper_closed = false;
        if (p < tc) {
            i.lower = p;
            i.lower_closed = true;
        } else {
            i.lower = p * (2.0 - tc) / (2.0 - p);
            i.lower_closed = false;
        }
        return i;
    }
    if (p >= 2.0 + tc) return Interval::none(K::s_range_dual, "empty for p >= 2 + tau'");
    i.kind = K::s_range_dual;
    i.note = "dual-derived";
    i.upper = tc * p / (p - 2.0);
    i.upper_closed = false;
    if (p <= 4.0 - tc) {
        i.lower = p * (2.0 - tc) / (p - 2.0);
        i.lower_closed = false;
    } else {
        i.lower = p;
        i.lower_closed = true;
    }
    return i;
}

Interval admissible_s(const ExponentTable& t, double p) { return admissible_s_tau(t.tau, p); }

ExponentTable compute_table(int m, int n, int k, double p) {
    check_args(m, n, k);
    if (!(p >= 1.0 && p <= 2.0)) throw PreconditionError("exponent table requires 1 <= p <= 2");
    ExponentTable t;
    t.m = m;
    t.n = n;
    t.k = k;
    t.h_exact = h_exact(m, n, k);
    t.tau_exact = Rational::make(static_cast<std::int64_t>(n) * t.h_exact.den, t.h_exact.num);
    t.tau_conj_exact = Rational::make(t.tau_exact.num, t.tau_exact.num - t.tau_exact.den);
    t.h = t.h_exact.value();
    t.tau = t.tau_exact.value();
    t.tau_conj = t.tau_conj_exact.value();
    t.p = p;
    t.p_conj = conjugate_exponent(p);
    t.q = q_of(t.tau, p);
    t.n_p = n_p(n, p);
    t.beta_free = t.n_p;
    t.beta_potential = t.n_p + 1.0;
    t.I_p = admissible_q(t, p);
    t.I_prime_p = admissible_s(t, p);
    return t;
}

double dispersive_exponent(const ExponentTable& t, double p, double q) {
    Interval ip = admissible_q(t, p);
    if (!ip.contains(q))
        throw PreconditionError("(p, q) = (" + format_number(p) + ", " + format_number(q) +
                                ") is not admissible: q must lie in I_p = " + ip.bracket());
    return static_cast<double>(t.n) / t.m * (1.0 / q - 1.0 / p);
}

double resolvent_exponent(const ExponentTable& t, double p, double q) {
    Interval ip = admissible_q(t, p);
    if (!ip.contains(q))
        throw PreconditionError("(p, q) = (" + format_number(p) + ", " + format_number(q) +
                                ") is not admissible: q must lie in I_p = " + ip.bracket());
    double gap = 1.0 / p - 1.0 / q;
    if (!(gap < static_cast<double>(t.m) / t.n))
        throw PreconditionError("resolvent bound requires 1/p - 1/q < m/n");
    return static_cast<double>(t.n) / t.m * gap - 1.0;
}

NondegenerateComparison compare_nondegenerate(int m, int n, double p) {
    check_args(m, n, 2);
    if (!(p >= 1.0 && p < 2.0)) throw PreconditionError("comparison requires 1 <= p < 2");
    NondegenerateComparison c;
    c.m = m;
    c.n = n;
    c.p = p;
    c.tau0 = Rational::make(2LL * (m - 1), m - 2).value();
    c.I_tau0 = admissible_q_tau(c.tau0, p);
    std::int64_t den = static_cast<std::int64_t>(m) * n - 2LL * n - 3LL * m + 2;
    c.h3_holds = static_cast<double>(n) > 3.0 + 4.0 / (m - 2);
    c.p_lower = 2.0 * n / (n + 2.0 * m - 2.0);
    if (den > 0) {
        c.tau1_defined = true;
        c.tau1 = Rational::make(2LL * n * (m - 1), den).value();
        Interval o;
        o.kind = Interval::Kind::q_range;
        o.lower = q_of(c.tau1, p);
        o.lower_closed = false;
        o.upper = conjugate_exponent(p);
        o.upper_closed = true;
        c.other = o;
        bool lower_ok = c.I_tau0.lower < o.lower ||
                        (c.I_tau0.lower == o.lower && (c.I_tau0.lower_closed || !o.lower_closed));
        bool upper_ok = c.I_tau0.contains(o.upper);
        bool differs = c.I_tau0.lower != o.lower || c.I_tau0.upper != o.upper ||
                       c.I_tau0.upper_closed != o.upper_closed;
        c.proper_containment = lower_ok && upper_ok && differs;
    } else {
        c.note = "tau1 undefined (mn - 2n - 3m + 2 <= 0); containment check skipped";
    }
    if (!c.h3_holds) {
        if (!c.note.empty()) c.note += "; ";
        c.note += "n <= 3 + 4/(m-2): the comparison theory does not apply, this one still does";
    }
    return c;
}

SpecialPotentialCheck special_potential_check(const ExponentTable& t, double p) {
    SpecialPotentialCheck r;
    r.beta_threshold = n_p(t.n, p) + 1.0;
    r.s = (p == 2.0) ? kInf : p / std::abs(p - 2.0);
    if (!(p >= 1.0 && p <= 3.0)) {
        r.reason = "requires 1 <= p <= 3";
        return r;
    }
    if (!(n_p(t.n, p) < t.m / 2.0)) {
        r.reason = "requires n_p < m/2";
        return r;
    }
    r.applicable = true;
    Interval s = admissible_s_tau(t.tau, p);
    Interval tail;
    tail.lower = static_cast<double>(t.n) / t.m;
    tail.upper = kInf;
    tail.upper_closed = true;
    r.s_admissible = s.intersect(tail).contains(r.s);
    if (!r.s_admissible) r.reason = "s = p/|p-2| outside I'_p intersected with (n/m, inf]";
    return r;
}

} // namespace schrodlab
