#include "schrodlab/potential.hpp"

#include "schrodlab/error.hpp"
#include "schrodlab/fit.hpp"
#include "schrodlab/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace schrodlab {

namespace {

const cplx I(0.0, 1.0);

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::vector<cplx> pointwise(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

StateField times_field(const std::vector<cplx>& v, const StateField& u) {
    return StateField(u.grid(), pointwise(v, u.values()));
}

void axpy(cplx a, const std::vector<cplx>& x, std::vector<cplx>& y) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double l2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

StateField resolvent0(const StateField& f, cplx lambda) { return resolvent_apply(f, lambda); }

StateField resolvent0_adjoint(const StateField& f, cplx lambda) {
    return apply_multiplier(f, [lambda](double P, size_t) { return 1.0 / (std::conj(lambda) + I * P); });
}

void finish(PotentialSpec& V) {
    if (V.V1.size() != V.grid->size() || V.V2.size() != V.grid->size())
        throw DimensionError("potential field size does not match grid");
    if (!(V.s1 >= 1.0) || !(V.s2 >= 1.0)) throw PreconditionError("declared exponents s_j must be >= 1");
    V.norm1 = discrete_norm(V.grid, V.V1, V.s1);
    V.norm2 = discrete_norm(V.grid, V.V2, V.s2);
    if (!std::isfinite(V.norm1) || !std::isfinite(V.norm2))
        throw PreconditionError("measured potential norm is not finite");
}

} // namespace

std::vector<cplx> PotentialSpec::total() const {
    std::vector<cplx> v(V1);
    for (size_t i = 0; i < v.size(); ++i) v[i] += V2[i];
    return v;
}

bool PotentialSpec::is_zero() const {
    for (size_t i = 0; i < V1.size(); ++i)
        if (V1[i] + V2[i] != cplx(0.0)) return false;
    return true;
}

double PotentialSpec::sup_real() const {
    double m = -kInf;
    for (size_t i = 0; i < V1.size(); ++i) m = std::max(m, (V1[i] + V2[i]).real());
    return m;
}

double PotentialSpec::sup_abs() const {
    double m = 0.0;
    for (size_t i = 0; i < V1.size(); ++i) m = std::max(m, std::abs(V1[i] + V2[i]));
    return m;
}

double discrete_norm(const GridPtr& grid, const std::vector<cplx>& v, double s) {
    return StateField(grid, v).norm(s);
}

PotentialSpec gaussian_bump(GridPtr grid, cplx amplitude, double width, Point center, double s) {
    if (!(width > 0)) throw PreconditionError("bump width must be positive");
    const int n = grid->n();
    if (center.empty()) center.assign(static_cast<size_t>(n), 0.0);
    if (static_cast<int>(center.size()) != n) throw DimensionError("bump center dimension");
    PotentialSpec V;
    V.kind = "gaussian_bump";
    V.grid = grid;
    V.V1.resize(grid->size());
    V.V2.assign(grid->size(), 0.0);
    for (size_t off = 0; off < grid->size(); ++off) {
        Point x = grid->x_at(off);
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) {
            double y = x[static_cast<size_t>(d)] - center[static_cast<size_t>(d)];
            r2 += y * y;
        }
        V.V1[off] = amplitude * std::exp(-r2 / (2 * width * width));
    }
    V.s1 = s;
    V.s2 = s; // V2 = 0 lies in every L^s
    char buf[128];
    std::snprintf(buf, sizeof buf, "(%g%+gi) exp(-|x-c|^2/(2*%g^2))", amplitude.real(), amplitude.imag(), width);
    V.description = buf;
    finish(V);
    return V;
}

PotentialSpec inverse_power(GridPtr grid, cplx amplitude, double a, double s1, double s2) {
    if (!(a > 0)) throw PreconditionError("inverse power exponent must be positive");
    PotentialSpec V;
    V.kind = "inverse_power";
    V.grid = grid;
    V.V1.assign(grid->size(), 0.0);
    V.V2.assign(grid->size(), 0.0);
    const double r0 = 0.5 * grid->dx(); // value used at the origin node
    for (size_t off = 0; off < grid->size(); ++off) {
        double r = std::max(norm2(grid->x_at(off)), r0);
        cplx v = amplitude * std::pow(r, -a);
        (r < 1.0 ? V.V1 : V.V2)[off] = v;
    }
    V.s1 = s1;
    V.s2 = s2;
    V.singular = true;
    char buf[128];
    std::snprintf(buf, sizeof buf, "(%g%+gi) |x|^-%g", amplitude.real(), amplitude.imag(), a);
    V.description = buf;
    finish(V);
    return V;
}

PotentialSpec grid_potential(GridPtr grid, std::vector<cplx> V1, std::vector<cplx> V2, double s1,
                             double s2, std::string kind) {
    PotentialSpec V;
    V.kind = std::move(kind);
    V.grid = std::move(grid);
    V.V1 = std::move(V1);
    V.V2 = V2.empty() ? std::vector<cplx>(V.V1.size(), 0.0) : std::move(V2);
    V.s1 = s1;
    V.s2 = s2;
    V.description = "grid field";
    finish(V);
    return V;
}

GateVerdict admissibility_gate(double p, double s1, double s2, const ExponentTable& table) {
    GateVerdict g;
    if (!(p >= 1.0)) {
        g.reason = "p must be >= 1";
        return g;
    }
    g.I_prime = admissible_s(table, p);
    Interval lower;
    lower.kind = Interval::Kind::s_range;
    lower.lower = static_cast<double>(table.n) / table.m;
    lower.upper = kInf;
    lower.lower_closed = false;
    lower.upper_closed = true;
    g.window = g.I_prime.intersect(lower);
    g.dual_route = p > 2.0;
    if (g.dual_route)
        g.dual_note = "for p > 2 the admissible range is obtained by duality; the generator is read as "
                      "(-iP(D) + conj V)*, which coincides with iP(D) + V on the grid";
    auto spec = special_potential_check(table, p);
    g.special_applicable = spec.applicable;
    g.special_s = spec.s;
    g.special_admissible = spec.s_admissible;
    g.special_note = spec.reason;

    if (g.I_prime.empty) {
        g.reason = "I'_p is empty for p = " + format_number(p) + " (p >= 2 + tau' = " +
                   format_number(2.0 + table.tau_conj) + ")";
        return g;
    }
    const double s[2] = {s1, s2};
    for (int j = 0; j < 2; ++j) {
        if (!g.window.contains(s[j])) {
            g.reason = "s" + std::to_string(j + 1) + " = " + format_number(s[j]) +
                       " is not in I'_p ∩ (n/m, inf] = " + g.window.bracket();
            return g;
        }
    }
    g.admissible = true;
    g.reason = "s1, s2 in " + g.window.bracket();
    return g;
}

ContractionEstimate contraction_estimate(const PotentialSpec& V, cplx lambda, double p) {
    if (lambda.real() == 0.0) throw PreconditionError("contraction estimate requires Re lambda != 0");
    if (!(p >= 1.0)) throw PreconditionError("p must be >= 1");
    const GridPtr& g = V.grid;
    const auto v = V.total();
    ContractionEstimate est;
    est.lambda = lambda;
    if (p == 1.0 || std::isinf(p)) {
        // Kernel of R0 as matrix entries k_{i-j}.
        std::vector<cplx> delta(g->size(), 0.0);
        delta[0] = 1.0;
        auto k = resolvent0(StateField(g, delta), lambda).values();
        if (std::isinf(p)) {
            double ks = 0.0;
            for (const auto& z : k) ks += std::abs(z);
            est.gamma = V.sup_abs() * ks;
            est.method = "exact row sum";
        } else {
            // column sums c_j = sum_i |V_i| |k_{i-j}|
            std::vector<cplx> a(v.size()), b(k.size());
            for (size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
            for (size_t i = 0; i < k.size(); ++i) b[i] = std::abs(k[i]);
            auto A = g->to_freq(a), B = g->to_freq(b);
            for (size_t i = 0; i < A.size(); ++i) A[i] *= std::conj(B[i]);
            auto c = g->from_freq(A);
            double m = 0.0;
            for (const auto& z : c) m = std::max(m, z.real());
            est.gamma = m;
            est.method = "exact column sum";
        }
        return est;
    }
    // Power iteration in the L^p pairing (Boyd); J_p(y) = |y|^{p-1} sgn y.
    const double pc = p / (p - 1.0);
    auto J = [](const std::vector<cplx>& y, double r) {
        std::vector<cplx> out(y.size());
        for (size_t i = 0; i < y.size(); ++i) {
            double a = std::abs(y[i]);
            out[i] = a > 0 ? y[i] / a * std::pow(a, r - 1.0) : cplx(0.0);
        }
        return out;
    };
    size_t peak = 0;
    for (size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[peak])) peak = i;
    const Point c = g->x_at(peak);
    const auto vbar = [&] {
        std::vector<cplx> w(v);
        for (auto& z : w) z = std::conj(z);
        return w;
    }();
    for (double width : {1.0, g->L() / 4}) {
        StateField x = StateField::from_function(g, [&](const Point& y) {
            double r2 = 0.0;
            for (size_t d = 0; d < y.size(); ++d) r2 += (y[d] - c[d]) * (y[d] - c[d]);
            return cplx(std::exp(-r2 / (2 * width * width)));
        });
        double prev = 0.0, best = 0.0;
        for (int it = 0; it < 200; ++it) {
            double xn = x.norm(p);
            StateField y = times_field(v, resolvent0(x, lambda));
            double ratio = y.norm(p) / xn;
            best = std::max(best, ratio);
            ++est.iterations;
            if (it > 2 && std::abs(ratio - prev) <= 1e-7 * ratio) break;
            prev = ratio;
            StateField z = resolvent0_adjoint(StateField(g, pointwise(vbar, J(y.values(), p))), lambda);
            x = StateField(g, J(z.values(), pc));
            if (x.norm(p) == 0.0) break;
        }
        est.gamma = std::max(est.gamma, best);
    }
    est.method = p == 2.0 ? "power iteration" : "duality power iteration";
    return est;
}

OmegaSearch find_omega(const PotentialSpec& V, double p, double imag_ratio, double threshold) {
    OmegaSearch s;
    auto gamma = [&](double a) {
        auto e = contraction_estimate(V, cplx(a, imag_ratio * a), p);
        s.ladder.push_back(e);
        return e.gamma;
    };
    double hi = 1.0;
    while (gamma(hi) >= threshold) {
        hi *= 2.0;
        if (hi > 1e9) throw PreconditionError("no Re lambda below 1e9 gives a contraction below " + format_number(threshold));
    }
    double lo = hi / 2.0;
    if (hi == 1.0) {
        lo = 1.0;
        while (lo > 1e-6 && gamma(lo / 2.0) < threshold) lo /= 2.0;
        hi = lo;
        lo = hi / 2.0;
    }
    for (int it = 0; it < 60 && hi - lo > 1e-6 * hi; ++it) {
        double mid = std::sqrt(lo * hi);
        (gamma(mid) < threshold ? hi : lo) = mid;
    }
    s.omega = hi;
    std::sort(s.ladder.begin(), s.ladder.end(),
              [](const auto& a, const auto& b) { return a.lambda.real() < b.lambda.real(); });
    return s;
}

double perturbed_residual(const PotentialSpec& V, const StateField& u, const StateField& f,
                          cplx lambda) {
    StateField a = apply_multiplier(u, [lambda](double P, size_t) { return lambda - I * P; });
    auto r = a.values();
    const auto v = V.total();
    for (size_t i = 0; i < r.size(); ++i) r[i] -= v[i] * u.values()[i] + f.values()[i];
    return l2(r) / l2(f.values());
}

GmresResult direct_solve(const PotentialSpec& V, const StateField& f, cplx lambda, double tol,
                         int restart, int max_iter) {
    // (I - R0 V) u = R0 f
    const GridPtr& g = f.grid();
    const auto v = V.total();
    auto op = [&](const std::vector<cplx>& x) {
        auto y = resolvent0(StateField(g, pointwise(v, x)), lambda).values();
        for (size_t i = 0; i < y.size(); ++i) y[i] = x[i] - y[i];
        return y;
    };
    const auto b = resolvent0(f, lambda).values();
    const double bnorm = l2(b);
    GmresResult res;
    std::vector<cplx> x(b.size(), 0.0);
    if (bnorm == 0.0) {
        res.u = StateField(g, x);
        res.converged = true;
        return res;
    }
    while (res.iterations < max_iter) {
        auto r = op(x);
        for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
        double beta = l2(r);
        res.relative_residual = beta / bnorm;
        if (res.relative_residual <= tol) {
            res.converged = true;
            break;
        }
        std::vector<std::vector<cplx>> Q;
        Q.reserve(static_cast<size_t>(restart) + 1);
        for (auto& z : r) z /= beta;
        Q.push_back(std::move(r));
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(restart + 1, restart);
        Eigen::VectorXcd y;
        int k = 0;
        for (; k < restart && res.iterations < max_iter; ++k) {
            ++res.iterations;
            auto w = op(Q[static_cast<size_t>(k)]);
            for (int j = 0; j <= k; ++j) {
                cplx h = inner(Q[static_cast<size_t>(j)], w);
                H(j, k) = h;
                axpy(-h, Q[static_cast<size_t>(j)], w);
            }
            double hn = l2(w);
            H(k + 1, k) = hn;
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(k + 2);
            rhs(0) = beta;
            auto Hk = H.topLeftCorner(k + 2, k + 1);
            y = Hk.colPivHouseholderQr().solve(rhs);
            double est = (rhs - Hk * y).norm() / bnorm;
            if (hn == 0.0 || est <= tol) {
                ++k;
                break;
            }
            for (auto& z : w) z /= hn;
            Q.push_back(std::move(w));
        }
        for (int j = 0; j < static_cast<int>(y.size()); ++j) axpy(y(j), Q[static_cast<size_t>(j)], x);
    }
    if (!res.converged) {
        auto r = op(x);
        for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
        res.relative_residual = l2(r) / bnorm;
        res.converged = res.relative_residual <= tol;
    }
    res.u = StateField(g, std::move(x));
    return res;
}

BornSeriesResult born_resolvent(const PotentialSpec& V, const StateField& f, cplx lambda, double p,
                                const ExponentTable& table) {
    if (f.grid() != V.grid) throw DimensionError("potential and state live on different grids");
    auto gate = admissibility_gate(p, V.s1, V.s2, table);
    if (!gate.admissible) throw PreconditionError("potential rejected by the admissibility gate: " + gate.reason);
    BornSeriesResult r;
    r.lambda = lambda;
    r.p = p;
    r.gamma = contraction_estimate(V, lambda, p).gamma;
    if (r.gamma >= 0.5) {
        double imag_ratio = lambda.real() != 0.0 ? lambda.imag() / lambda.real() : 0.0;
        auto om = find_omega(V, p, imag_ratio);
        throw PreconditionError("measured contraction |V R0(lambda)| = " + sci(r.gamma) +
                                " >= 1/2; use Re lambda > " + sci(om.omega));
    }
    const auto v = V.total();
    StateField term = resolvent0(f, lambda);
    auto sum = term.values();
    r.terms = 1;
    int growing = 0;
    double last = kInf;
    while (r.terms < kBornMaxTerms) {
        term = resolvent0(times_field(v, term), lambda);
        axpy(1.0, term.values(), sum);
        ++r.terms;
        double s = l2(sum);
        double inc = s > 0 ? l2(term.values()) / s : 0.0;
        r.increments.push_back(inc);
        if (inc < kBornIncrement) break;
        growing = inc > last ? growing + 1 : 0;
        last = inc;
        if (growing >= 5) {
            r.diagnostic = "series increments grew for 5 consecutive terms (last " + sci(inc) + ")";
            break;
        }
    }
    r.u = StateField(f.grid(), std::move(sum));
    r.residual = perturbed_residual(V, r.u, f, lambda);
    auto d = direct_solve(V, f, lambda);
    r.direct = d.u;
    r.direct_residual = perturbed_residual(V, d.u, f, lambda);
    double dn = r.direct.norm(2);
    r.agreement = dn > 0 ? distance(r.u, r.direct, 2) / dn : distance(r.u, r.direct, 2);
    bool converged = r.increments.empty() || r.increments.back() < kBornIncrement;
    if (!converged && r.diagnostic.empty())
        r.diagnostic = "series stopped at " + std::to_string(kBornMaxTerms) + " terms with increment " +
                       sci(r.increments.back());
    r.accepted = converged && r.residual < kBornResidual;
    if (converged && !r.accepted) r.diagnostic = "series residual " + sci(r.residual) + " above 1e-8";
    return r;
}

StateField strang(const PotentialSpec& V, const StateField& u0, double t, int steps) {
    if (steps < 1) throw PreconditionError("step count must be >= 1");
    const double dt = t / steps;
    const auto v = V.total();
    std::vector<cplx> half(v.size()), full(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        half[i] = std::exp(0.5 * dt * v[i]);
        full[i] = half[i] * half[i];
    }
    const auto& P = u0.grid()->symbol_table();
    std::vector<cplx> free(P.size());
    for (size_t i = 0; i < P.size(); ++i) free[i] = std::exp(I * (dt * P[i]));
    StateField u = times_field(half, u0);
    for (int s = 0; s < steps; ++s) {
        u = apply_table(u, free);
        u = times_field(s + 1 == steps ? half : full, u);
    }
    return u;
}

EvolveResult evolve(const PotentialSpec& V, const StateField& u0, double t, double dt) {
    if (u0.grid() != V.grid) throw DimensionError("potential and state live on different grids");
    if (!(dt > 0)) throw PreconditionError("time step must be positive");
    auto c0 = measure_confinement(u0);
    if (c0.spectral_tail >= kConfinementBudget || c0.boundary_mass >= kConfinementBudget)
        throw PreconditionError("initial state is not confined: spectral tail " + sci(c0.spectral_tail) +
                                ", boundary mass " + sci(c0.boundary_mass) + " (budget 1e-8)");
    EvolveResult r;
    if (t == 0.0) {
        r.u = u0;
        return r;
    }
    int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt - 1e-9)));
    StateField a = strang(V, u0, t, steps);
    StateField b = strang(V, u0, t, 2 * steps);
    double bn = b.norm(2);
    r.doubling_change = bn > 0 ? distance(a, b, 2) / bn : 0.0;
    r.steps = 2 * steps;
    r.dt = t / r.steps;
    if (!(r.doubling_change < kStepDoubling))
        throw PreconditionError("step doubling changed the solution by " + sci(r.doubling_change) +
                                " (limit 1e-6) at dt = " + sci(t / steps) + "; reduce dt");
    auto c1 = measure_confinement(b);
    if (c1.spectral_tail >= kConfinementBudget || c1.boundary_mass >= kConfinementBudget)
        throw PreconditionError("evolved state is not confined: spectral tail " + sci(c1.spectral_tail) +
                                ", boundary mass " + sci(c1.boundary_mass) + " (budget 1e-8)");
    r.u = std::move(b);
    return r;
}

OrderFit strang_order(const PotentialSpec& V, const StateField& u0, double t,
                      const std::vector<double>& dts) {
    OrderFit f;
    f.dts = dts;
    for (double dt : dts) {
        int steps = std::max(1, static_cast<int>(std::lround(t / dt)));
        StateField a = strang(V, u0, t, steps);
        StateField b = strang(V, u0, t, 2 * steps);
        f.errors.push_back(distance(a, b, 2) / b.norm(2));
    }
    auto lf = fit_loglog(f.dts, f.errors);
    f.slope = lf.slope;
    f.residual = lf.residual;
    return f;
}

StateField duhamel_first(const PotentialSpec& V, const StateField& u0, double t, int nodes) {
    const auto v = V.total();
    std::vector<cplx> acc(u0.values().size(), 0.0);
    if (t == 0.0) return StateField(u0.grid(), acc);
    auto r = gauss_legendre(nodes, 0.0, t);
    for (size_t k = 0; k < r.x.size(); ++k) {
        StateField w = propagate_unchecked(times_field(v, propagate_unchecked(u0, r.x[k])), t - r.x[k]);
        axpy(r.w[k], w.values(), acc);
    }
    return StateField(u0.grid(), std::move(acc));
}

StateField duhamel_second(const PotentialSpec& V, const StateField& u0, double t, int nodes) {
    const auto v = V.total();
    std::vector<cplx> acc(u0.values().size(), 0.0);
    if (t == 0.0) return StateField(u0.grid(), acc);
    auto r = gauss_legendre(nodes, 0.0, t);
    for (size_t k = 0; k < r.x.size(); ++k) {
        StateField inner1 = duhamel_first(V, u0, r.x[k], nodes);
        StateField w = propagate_unchecked(times_field(v, inner1), t - r.x[k]);
        axpy(r.w[k], w.values(), acc);
    }
    return StateField(u0.grid(), std::move(acc));
}

DuhamelCheck duhamel_check(const PotentialSpec& V, const StateField& u0,
                           const std::vector<double>& times) {
    DuhamelCheck c;
    c.times = times;
    const double n0 = u0.norm(2);
    for (double t : times) {
        if (!(t > 0)) throw PreconditionError("Duhamel times must be positive");
        StateField u = evolve(V, u0, t, t / 256.0).u;
        auto approx = propagate_unchecked(u0, t).values();
        axpy(1.0, duhamel_first(V, u0, t).values(), approx);
        axpy(1.0, duhamel_second(V, u0, t).values(), approx);
        double e = distance(u, StateField(u0.grid(), std::move(approx)), 2) / n0;
        c.errors.push_back(e);
        c.ratios.push_back(e / (t * t * t));
    }
    auto [lo, hi] = std::minmax_element(c.ratios.begin(), c.ratios.end());
    c.spread = *lo > 0 ? *hi / *lo : kInf;
    c.stabilized = c.spread <= 2.0;
    return c;
}

GrowthReport growth_check(const PotentialSpec& V, double p, double beta,
                          const std::vector<double>& times, const std::vector<Probe>& probes,
                          const ExponentTable& table, double dt) {
    auto gate = admissibility_gate(p, V.s1, V.s2, table);
    if (!gate.admissible) throw PreconditionError("potential rejected by the admissibility gate: " + gate.reason);
    const double np = n_p(V.grid->n(), p);
    if (!(beta > np + 1.0))
        throw PreconditionError("growth check requires beta > n_p + 1 = " + format_number(np + 1.0));
    if (times.empty() || !std::is_sorted(times.begin(), times.end()) || times.front() < 0)
        throw PreconditionError("growth times must be non-negative and ascending");
    if (probes.empty()) throw PreconditionError("probe family is empty");
    GrowthReport g;
    g.p = p;
    g.beta = beta;
    g.times = times;
    g.gronwall_rate = V.sup_real();
    g.proxy_note = "normalized by the Sobolev proxy |F^-1((1+P)^beta u0^)|_p in place of the "
                   "fractional power of the perturbed generator";
    g.envelope.assign(times.size(), 0.0);
    for (const auto& pr : probes) {
        StateField proxy = apply_multiplier(pr.field, [beta](double P, size_t) { return cplx(std::pow(1.0 + P, beta)); });
        const double base = proxy.norm(p);
        StateField u = pr.field;
        double now = 0.0;
        g.probe_names.push_back(pr.name);
        g.ratios.emplace_back();
        for (size_t i = 0; i < times.size(); ++i) {
            if (times[i] > now) {
                u = evolve(V, u, times[i] - now, dt).u;
                now = times[i];
            }
            g.ratios.back().push_back(u.norm(p) / base);
            g.envelope[i] = std::max(g.envelope[i], g.ratios.back().back());
        }
    }
    g.finite = std::all_of(g.envelope.begin(), g.envelope.end(), [](double x) { return std::isfinite(x) && x > 0; });
    if (!g.finite) return g;
    std::vector<double> logs;
    for (double e : g.envelope) logs.push_back(std::log(e));
    if (times.size() >= 2) {
        auto lf = fit_line(times, logs);
        g.omega_fit = lf.slope;
        g.intercept = lf.intercept;
    }
    g.max_second_difference = 0.0;
    g.late_second_difference = 0.0;
    g.max_rate = -kInf;
    for (size_t i = 0; i + 1 < times.size(); ++i)
        g.max_rate = std::max(g.max_rate, (logs[i + 1] - logs[i]) / (times[i + 1] - times[i]));
    bool first = true, first_late = true;
    for (size_t i = 1; i + 1 < times.size(); ++i) {
        double a = (logs[i] - logs[i - 1]) / (times[i] - times[i - 1]);
        double b = (logs[i + 1] - logs[i]) / (times[i + 1] - times[i]);
        double d2 = 2.0 * (b - a) / (times[i + 1] - times[i - 1]);
        g.max_second_difference = first ? d2 : std::max(g.max_second_difference, d2);
        first = false;
        if (times[i - 1] >= 0.5 * times.back()) {
            g.late_second_difference = first_late ? d2 : std::max(g.late_second_difference, d2);
            first_late = false;
        }
    }
    constexpr double slack = 1e-3;
    g.concave = g.max_second_difference <= slack;
    g.late_concave = g.late_second_difference <= slack;
    return g;
}

} // namespace schrodlab
