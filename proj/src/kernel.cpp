#include "schrodlab/kernel.hpp"

#include "schrodlab/error.hpp"
#include "schrodlab/exponents.hpp"
#include "schrodlab/fft.hpp"
#include "schrodlab/geometry.hpp"
#include "schrodlab/parallel.hpp"
#include "schrodlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace schrodlab {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

// C-infinity smoothstep used for frequency windows.
double smooth_inf(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

cplx ipow(cplx z, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

struct PathIntegrator {
    int n, m;
    cplx b;
    CutoffMode mode;
    double tol;
    double abs_tol;
    double min_imf = 0.0;
    double err = 0.0;
    bool ok = true;

    cplx phase(cplx z) const { return ipow(z, m) + b * z; }

    cplx g(cplx z, bool real_cutoff) {
        cplx f = phase(z);
        min_imf = std::min(min_imf, f.imag());
        cplx v = ipow(z, n - 1) * std::exp(I * f);
        if (real_cutoff) v *= cutoff_smoothstep(z.real());
        return v;
    }

    cplx segment(cplx A, cplx B, bool real_cutoff = false) {
        cplx d = B - A;
        auto r = integrate_gk([&](double s) { return g(A + s * d, real_cutoff) * d; }, 0.0, 1.0,
                              abs_tol, tol);
        err += r.error;
        ok = ok && r.converged;
        return r.value;
    }

    cplx ray(cplx A, double theta) {
        cplx e = std::polar(1.0, theta);
        double base = phase(A).imag();
        double rho = 0.25 / (1.0 + std::abs(b));
        for (int i = 0; i < 200; ++i) {
            cplx z = A + rho * e;
            double grow = phase(z).imag() - base;
            double poly = (n - 1) * std::log(std::abs(z) + 1.0);
            if (grow > 45.0 + poly) break;
            rho *= 1.5;
        }
        // Split the ray so the adaptive rule sees the decay scale.
        double acc_lo = 0.0;
        cplx sum = 0.0;
        double piece = std::max(rho / 8.0, 1e-3);
        while (acc_lo < rho) {
            double hi = std::min(rho, acc_lo + piece);
            auto r = integrate_gk([&](double s) { return g(A + s * e, false) * e; }, acc_lo, hi,
                                  abs_tol, tol);
            sum += r.value;
            err += r.error;
            ok = ok && r.converged;
            acc_lo = hi;
        }
        return sum;
    }
};

} // namespace

double cutoff_smoothstep(double t) {
    if (t <= 1.0) return 0.0;
    if (t >= 2.0) return 1.0;
    double x = t - 1.0;
    return x * x * x * x * x * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + x * 70.0))));
}

RadialValue radial_factor(int n, int m, cplx b, CutoffMode mode, double tol) {
    if (n < 1 || m < 2) throw PreconditionError("radial_factor: bad (n, m)");
    if (b.imag() < 0) throw PreconditionError("radial_factor: regularization must be >= 0");
    PathIntegrator pi_{n, m, b, mode, tol, tol * 1e-2};
    const double theta = pi / (2.0 * m);
    const double br = b.real();
    cplx total = 0.0;
    if (mode == CutoffMode::Full) {
        if (br >= 0.0) {
            total = pi_.ray(0.0, theta);
        } else {
            double t0 = std::pow(-br / m, 1.0 / (m - 1));
            double delta = 0.5 * t0;
            cplx dir = std::polar(1.0, pi / 4.0);
            cplx P1 = t0 - delta * dir, P2 = t0 + delta * dir;
            total = pi_.segment(0.0, P1) + pi_.segment(P1, P2) + pi_.ray(P2, theta);
        }
    } else {
        double t0 = br < 0.0 ? std::pow(-br / m, 1.0 / (m - 1)) : 0.0;
        double T1 = std::max(2.0, 1.25 * t0);
        std::vector<double> knots{1.0, 2.0, T1};
        for (double s : {0.5 * t0, t0, 2.0 * t0})
            if (s > 1.0 && s < T1) knots.push_back(s);
        std::sort(knots.begin(), knots.end());
        knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
        for (size_t i = 0; i + 1 < knots.size(); ++i) {
            // Subdivide long real pieces by local oscillation count.
            double a = knots[i], c = knots[i + 1];
            double osc = (std::pow(c, m) + std::abs(br) * c) / (2 * pi);
            int pieces = std::max(1, static_cast<int>(osc / 4.0));
            for (int j = 0; j < pieces; ++j) {
                double lo = a + (c - a) * j / pieces, hi = a + (c - a) * (j + 1) / pieces;
                total += pi_.segment(lo, hi, true);
            }
        }
        total += pi_.ray(T1, theta);
    }
    RadialValue out;
    out.value = total;
    out.error = pi_.err;
    if (!pi_.ok) {
        out.flagged = true;
        out.reason = "adaptive quadrature did not converge";
    }
    if (pi_.min_imf < -1.0) {
        out.flagged = true;
        out.reason = "contour left the decay region (Im phase " + std::to_string(pi_.min_imf) + ")";
    }
    return out;
}

cplx radial_factor_series(int n, int m, cplx b, int terms) {
    cplx sum = 0.0;
    cplx ib = I * b;
    cplx pw = 1.0;
    double fact = 1.0;
    for (int j = 0; j < terms; ++j) {
        if (j > 0) {
            pw *= ib;
            fact *= j;
        }
        double s = n + j;
        sum += pw / fact * std::tgamma(s / m) * std::polar(1.0, pi * s / (2.0 * m));
    }
    return sum / static_cast<double>(m);
}

OscillatoryPlan make_plan(const PolySymbol& P, const Point& x) {
    OscillatoryPlan pl;
    pl.x = x;
    pl.r = norm2(x);
    if (pl.r == 0.0) throw PreconditionError("kernel plan needs x != 0");
    pl.eta = x;
    for (double& v : pl.eta) v /= pl.r;
    // max over the surface of |<eta, xi>| from a sampled scan
    double best = 0.0;
    for (const auto& d : sphere_samples(P.n(), P.n() == 2 ? 1024 : 2048)) {
        double R = std::pow(P.eval(d), -1.0 / P.m());
        best = std::max(best, std::abs(R * dot(d, pl.eta)));
    }
    pl.rbar = pl.r * best;
    pl.t0 = std::pow(pl.rbar / P.m(), 1.0 / (P.m() - 1));
    pl.splits = {1.0, 2.0, 0.5 * pl.t0, pl.t0, 2.0 * pl.t0};
    std::sort(pl.splits.begin(), pl.splits.end());
    return pl;
}

namespace {

struct SurfaceSum {
    cplx value;
    double gk_err = 0.0;
    double mass = 0.0;
    bool flagged = false;
    std::string reason;
};

// Trapezoid (n=2) or Gauss-Legendre x trapezoid (n=3) surface rule.
class SurfaceRule {
public:
    SurfaceRule(const PolySymbol& P, const Point& x, double eps, CutoffMode mode)
        : P_(P), x_(x), eps_(eps), mode_(mode) {}

    struct Node {
        cplx v;
        double err;
        double absv;
        bool flagged;
        std::string reason;
    };

    Node eval(const Point& omega) const {
        double R = std::pow(P_.eval(omega), -1.0 / P_.m());
        double b = R * dot(omega, x_);
        auto g = radial_factor(P_.n(), P_.m(), cplx(b, eps_), mode_);
        double Rn = std::pow(R, P_.n());
        return {Rn * g.value, Rn * g.error, Rn * std::abs(g.value), g.flagged, g.reason};
    }

    // n = 2: nodes theta_j = 2 pi j / N, reused across doublings.
    SurfaceSum circle(int N, std::vector<Node>& cache) const {
        int have = static_cast<int>(cache.size());
        std::vector<Node> next(static_cast<size_t>(N));
        if (have > 0) {
            int stride = N / have;
            for (int j = 0; j < have; ++j) next[static_cast<size_t>(j * stride)] = cache[static_cast<size_t>(j)];
        }
        int stride = have > 0 ? N / have : 1;
        std::vector<int> todo;
        for (int j = 0; j < N; ++j)
            if (have == 0 || j % stride != 0) todo.push_back(j);
        parallel_for(todo.size(), [&](size_t i) {
            double th = 2.0 * pi * todo[i] / N;
            next[static_cast<size_t>(todo[i])] = eval({std::cos(th), std::sin(th)});
        });
        cache = std::move(next);
        return reduce(cache, std::vector<double>(static_cast<size_t>(N), 2.0 * pi / N));
    }

    SurfaceSum sphere(int Nz) const {
        auto gl = gauss_legendre(Nz, -1.0, 1.0);
        int Na = 2 * Nz;
        std::vector<Node> nodes(static_cast<size_t>(Nz * Na));
        std::vector<double> w(nodes.size());
        parallel_for(nodes.size(), [&](size_t idx) {
            size_t iz = idx / static_cast<size_t>(Na), ia = idx % static_cast<size_t>(Na);
            double z = gl.x[iz], s = std::sqrt(std::max(0.0, 1.0 - z * z));
            double ph = 2.0 * pi * static_cast<double>(ia) / Na;
            nodes[idx] = eval({s * std::cos(ph), s * std::sin(ph), z});
            w[idx] = gl.w[iz] * 2.0 * pi / Na;
        });
        return reduce(nodes, w);
    }

private:
    SurfaceSum reduce(const std::vector<Node>& nodes, const std::vector<double>& w) const {
        SurfaceSum s;
        double norm = std::pow(2.0 * pi, -P_.n());
        for (size_t i = 0; i < nodes.size(); ++i) {
            s.value += w[i] * nodes[i].v;
            s.gk_err += w[i] * nodes[i].err;
            s.mass += w[i] * nodes[i].absv;
            if (nodes[i].flagged && !s.flagged) {
                s.flagged = true;
                s.reason = nodes[i].reason;
            }
        }
        s.value *= norm;
        s.gk_err *= norm;
        s.mass *= norm;
        return s;
    }

    const PolySymbol& P_;
    Point x_;
    double eps_;
    CutoffMode mode_;
};

int next_pow2(double v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

KernelValue surface_value(const PolySymbol& P, const Point& x, double eps,
                          const KernelOptions& opt, const OscillatoryPlan& plan) {
    SurfaceRule rule(P, x, eps, opt.mode);
    KernelValue kv;
    int N = next_pow2(std::max(32.0, 2.0 * plan.t0 * plan.rbar));
    if (P.n() == 2) {
        std::vector<SurfaceRule::Node> cache;
        SurfaceSum prev = rule.circle(N, cache);
        for (;;) {
            int N2 = 2 * N;
            SurfaceSum cur = rule.circle(N2, cache);
            double diff = std::abs(cur.value - prev.value);
            kv.value = cur.value;
            kv.error = diff + cur.gk_err;
            kv.nodes = N2;
            if (cur.flagged) {
                kv.flagged = true;
                kv.reason = cur.reason;
            }
            if (diff <= opt.rel_tol * std::abs(cur.value) + 1e-14 * cur.mass) break;
            if (N2 >= opt.max_nodes) {
                kv.flagged = true;
                kv.reason = "surface rule did not converge at " + std::to_string(N2) + " nodes";
                break;
            }
            N = N2;
            prev = cur;
        }
    } else if (P.n() == 3) {
        int Nz = std::max(16, next_pow2(std::sqrt(static_cast<double>(N))));
        SurfaceSum prev = rule.sphere(Nz);
        for (;;) {
            int Nz2 = 2 * Nz;
            SurfaceSum cur = rule.sphere(Nz2);
            double diff = std::abs(cur.value - prev.value);
            kv.value = cur.value;
            kv.error = diff + cur.gk_err;
            kv.nodes = Nz2 * 2 * Nz2;
            if (cur.flagged) {
                kv.flagged = true;
                kv.reason = cur.reason;
            }
            if (diff <= opt.rel_tol * std::abs(cur.value) + 1e-14 * cur.mass) break;
            if (kv.nodes >= opt.max_nodes * 4) {
                kv.flagged = true;
                kv.reason = "surface rule did not converge";
                break;
            }
            Nz = Nz2;
            prev = cur;
        }
    } else {
        throw PreconditionError("surface kernel evaluation supports n = 2 and n = 3 only");
    }
    return kv;
}

cplx neville_at_zero(const std::vector<double>& x, const std::vector<cplx>& y) {
    std::vector<cplx> p = y;
    const size_t n = x.size();
    for (size_t k = 1; k < n; ++k)
        for (size_t i = 0; i + k < n; ++i)
            p[i] = ((0.0 - x[i + k]) * p[i] + (x[i] - 0.0) * p[i + 1]) / (x[i] - x[i + k]);
    return p[0];
}

} // namespace

KernelValue eval_kernel_surface(const PolySymbol& P, const Point& x, const KernelOptions& opt) {
    if (static_cast<int>(x.size()) != P.n()) throw DimensionError("kernel point dimension");
    auto plan = make_plan(P, x);
    KernelValue kv = surface_value(P, x, 0.0, opt, plan);
    if (opt.eps_diagnostics) {
        std::vector<double> eps = opt.eps_schedule;
        for (size_t i = 1; i < eps.size(); ++i)
            if (!(eps[i] < eps[i - 1]) || !(eps[i] > 0))
                throw PreconditionError("eps schedule must decrease strictly to a positive floor");
        for (double e : eps) {
            KernelValue ke = surface_value(P, x, e, opt, plan);
            kv.eps_values.push_back(ke.value);
        }
        kv.extrapolated = neville_at_zero(eps, kv.eps_values);
        kv.eps_discrepancy = std::abs(kv.extrapolated - kv.value);
        for (size_t i = 2; i < kv.eps_values.size(); ++i)
            if (std::abs(kv.eps_values[i] - kv.eps_values[i - 1]) >
                std::abs(kv.eps_values[i - 1] - kv.eps_values[i - 2]))
                kv.eps_stabilized = false;
        if (!kv.eps_stabilized || kv.eps_discrepancy > 1e-2 * std::abs(kv.value) + kv.error) {
            kv.flagged = true;
            if (kv.reason.empty()) kv.reason = "eps extrapolation disagrees with the direct limit";
        }
    }
    return kv;
}

double FieldResult::dxi() const { return pi / L; }

cplx FieldResult::at(const std::vector<int>& idx) const {
    size_t off = 0;
    for (int i : idx) off = off * static_cast<size_t>(N) + static_cast<size_t>(i);
    return field.at(off);
}

FieldResult eval_kernel_fft(const PolySymbol& P, int N, double L, double t, Window w) {
    const int n = P.n(), m = P.m();
    if (N < 4 || (N & (N - 1)) != 0) throw PreconditionError("FFT grid size must be a power of two");
    if (!(L > 0)) throw PreconditionError("FFT half-width must be positive");
    FieldResult fr;
    fr.n = n;
    fr.N = N;
    fr.L = L;
    fr.t = t;
    fr.window = w;
    const double dxi = pi / L;
    const double xi_max = dxi * (N / 2);
    const double at = std::abs(t);
    // Surface extremes of R and |grad P| (homogeneity gives the rest).
    double Rmax = 0.0, gmax = 0.0, gmin = 1e300;
    for (const auto& d : sphere_samples(n, n == 2 ? 2048 : 4096)) {
        auto sp = surface_point(P, d);
        Rmax = std::max(Rmax, norm2(sp.xi));
        double g = norm2(P.gradient(sp.xi));
        gmax = std::max(gmax, g);
        gmin = std::min(gmin, g);
    }
    if (!w.none()) {
        if (!(w.b > w.a && w.a > 0)) throw PreconditionError("window needs 0 < a < b");
        if (at > 0) {
            double rho = w.b * std::pow(at, -1.0 / m); // phi cutoff in xi units
            if (rho * Rmax >= xi_max)
                throw PreconditionError("window support exceeds the frequency box; raise N or lower L");
            double reach = at * std::pow(rho, m - 1) * gmax;
            if (reach >= L)
                throw PreconditionError("aliasing risk: |t| max|grad P| over the window support is " +
                                        std::to_string(reach) + " >= L = " + std::to_string(L));
            fr.valid_radius = 0.5 * at * std::pow(w.a * std::pow(at, -1.0 / m), m - 1) * gmin;
        }
    } else if (at > 0) {
        double reach = at * std::pow(xi_max * std::sqrt(static_cast<double>(n)), m - 1) * gmax;
        if (reach >= L)
            throw PreconditionError("aliasing risk: untapered multiplier reaches " +
                                    std::to_string(reach) + " >= L");
    }
    FFT fft(n, N);
    const size_t total = fft.size();
    fr.multiplier.assign(total, 0.0);
    std::vector<cplx> a(total);
    const double tm = at > 0 ? std::pow(at, 1.0 / m) : 0.0;
    parallel_for(static_cast<size_t>(N), [&](size_t first) {
        size_t block = total / static_cast<size_t>(N);
        std::vector<int> k(static_cast<size_t>(n));
        Point xi(static_cast<size_t>(n));
        for (size_t off = first * block; off < (first + 1) * block; ++off) {
            size_t rem = off;
            int parity = 0;
            for (int d = n - 1; d >= 0; --d) {
                k[static_cast<size_t>(d)] = static_cast<int>(rem % static_cast<size_t>(N));
                rem /= static_cast<size_t>(N);
                xi[static_cast<size_t>(d)] = (k[static_cast<size_t>(d)] - N / 2) * dxi;
                parity += k[static_cast<size_t>(d)];
            }
            double Pv = P.eval(xi);
            double W = 1.0;
            if (!w.none()) {
                double ph = tm * std::pow(std::max(Pv, 0.0), 1.0 / m);
                W = 1.0 - smooth_inf((ph - w.a) / (w.b - w.a));
            }
            cplx mult = W == 0.0 ? cplx(0.0) : W * std::exp(I * (t * Pv));
            fr.multiplier[off] = mult;
            a[off] = (parity % 2) ? -mult : mult;
        }
    });
    fft.backward(a);
    const double scale = std::pow(dxi / (2.0 * pi), n);
    const double dx = 2.0 * L / N;
    double outer = 0.0, s_field = 0.0, s_mult = 0.0;
    for (size_t off = 0; off < total; ++off) {
        size_t rem = off;
        int parity = 0;
        bool edge = false;
        for (int d = n - 1; d >= 0; --d) {
            int j = static_cast<int>(rem % static_cast<size_t>(N));
            rem /= static_cast<size_t>(N);
            parity += j;
            if (std::abs((j - N / 2) * dx) > 0.9 * L) edge = true;
        }
        a[off] *= (parity % 2) ? -scale : scale;
        if (edge) outer = std::max(outer, std::abs(a[off]));
        s_field += std::norm(a[off]);
        s_mult += std::norm(fr.multiplier[off]);
    }
    double lhs = s_field * std::pow(dx, n);
    double rhs = s_mult * std::pow(dxi, n) * std::pow(2.0 * pi, -n);
    fr.plancherel_error = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
    fr.outer_max = outer;
    fr.field = std::move(a);
    return fr;
}

cplx interpolate_field(const FieldResult& f, const Point& x) {
    const int n = f.n, N = f.N;
    if (static_cast<int>(x.size()) != n) throw DimensionError("interpolation point dimension");
    const double dxi = f.dxi();
    std::vector<std::vector<cplx>> ph(static_cast<size_t>(n), std::vector<cplx>(static_cast<size_t>(N)));
    for (int d = 0; d < n; ++d)
        for (int k = 0; k < N; ++k)
            ph[static_cast<size_t>(d)][static_cast<size_t>(k)] =
                std::polar(1.0, x[static_cast<size_t>(d)] * (k - N / 2) * dxi);
    // Contract axes from the last to the first.
    std::vector<cplx> cur = f.multiplier;
    size_t len = cur.size();
    for (int d = n - 1; d >= 0; --d) {
        size_t outer = len / static_cast<size_t>(N);
        std::vector<cplx> nxt(outer);
        for (size_t o = 0; o < outer; ++o) {
            cplx s = 0.0;
            const cplx* row = &cur[o * static_cast<size_t>(N)];
            for (int k = 0; k < N; ++k) s += row[k] * ph[static_cast<size_t>(d)][static_cast<size_t>(k)];
            nxt[o] = s;
        }
        cur = std::move(nxt);
        len = outer;
    }
    return cur[0] * std::pow(dxi / (2.0 * pi), n);
}

KernelComparison compare_evaluators(const PolySymbol& P, int N, double L, Window w1, Window w2,
                                    const std::vector<Point>& points) {
    auto f1 = eval_kernel_fft(P, N, L, 1.0, w1);
    auto f2 = eval_kernel_fft(P, N, L, 1.0, w2);
    double floor = 0.0;
    for (const auto& v : f1.multiplier) floor += std::abs(v);
    floor *= 1e-14 * std::pow(f1.dxi() / (2.0 * pi), P.n());
    KernelComparison c;
    c.points = points;
    c.pass = true;
    for (const auto& x : points) {
        // Points must sit on the grid.
        std::vector<int> idx;
        for (double v : x) {
            double j = v / f1.dx() + N / 2;
            if (std::abs(j - std::round(j)) > 1e-9)
                throw PreconditionError("comparison point is not on the FFT grid");
            idx.push_back(static_cast<int>(std::lround(j)));
        }
        cplx a = f1.at(idx), b = f2.at(idx);
        double ferr = std::abs(a - b) + f1.outer_max + floor;
        auto kv = eval_kernel_surface(P, x);
        c.surface.push_back(kv.value);
        c.fft.push_back(a);
        c.surface_err.push_back(kv.error);
        c.fft_err.push_back(ferr);
        double ratio = std::abs(kv.value - a) / (kv.error + ferr);
        c.worst_ratio = std::max(c.worst_ratio, ratio);
        if (!(ratio <= 3.0) || kv.flagged) c.pass = false;
    }
    return c;
}

std::vector<double> dyadic_ladder(double lo, double hi) {
    std::vector<double> out;
    for (double r = lo; r <= hi * (1 + 1e-12); r *= 2.0) out.push_back(r);
    return out;
}

std::vector<Point> circle_directions(int count) {
    std::vector<Point> out;
    for (int d = 0; d < count; ++d) {
        double th = 2.0 * pi * d / count;
        Point p{std::cos(th), std::sin(th)};
        // exact zeros on the axes
        for (double& v : p)
            if (std::abs(v) < 1e-15) v = 0.0;
        if (count % 4 == 0 && d % (count / 4) == 0) {
            int q = d / (count / 4);
            p = {q == 0 ? 1.0 : (q == 2 ? -1.0 : 0.0), q == 1 ? 1.0 : (q == 3 ? -1.0 : 0.0)};
        }
        out.push_back(p);
    }
    return out;
}

KernelDecay fit_decay(const PolySymbol& P, int k, const std::vector<double>& ladder,
                      const std::vector<Point>& directions, double slack,
                      const KernelOptions& opt) {
    if (ladder.size() < 6) throw PreconditionError("decay ladder needs at least 6 radii");
    if (directions.empty()) throw PreconditionError("decay fit needs directions");
    for (size_t i = 1; i < ladder.size(); ++i)
        if (!(ladder[i] > ladder[i - 1])) throw PreconditionError("ladder must increase");
    KernelDecay out;
    out.directions = directions;
    std::vector<double> env;
    bool flagged = false;
    for (double r : ladder) {
        double best = 0.0;
        for (size_t d = 0; d < directions.size(); ++d) {
            Point x = directions[d];
            for (double& v : x) v *= r;
            auto kv = eval_kernel_surface(P, x, opt);
            out.samples.push_back({r, static_cast<int>(d), kv.value, kv.error, kv.flagged});
            flagged = flagged || kv.flagged;
            best = std::max(best, std::abs(kv.value));
        }
        env.push_back(best);
    }
    auto lf = fit_loglog(ladder, env);
    out.fit.abscissa = ladder;
    out.fit.values = env;
    out.fit.slope = lf.slope;
    out.fit.residual = lf.residual;
    out.fit.band = 2.0 * lf.slope_stderr;
    out.fit.predicted = -h_exact(P.m(), P.n(), k).value();
    out.fit.slack = slack;
    out.fit.pass = !flagged && lf.slope <= out.fit.predicted + slack;
    return out;
}

ScalingCheck check_scaling(const PolySymbol& P, int N, double L, Window w,
                           const std::vector<double>& times, int points) {
    const int n = P.n(), m = P.m();
    ScalingCheck sc;
    sc.times = times;
    sc.points = points;
    std::vector<FieldResult> fields;
    for (double t : times) fields.push_back(eval_kernel_fft(P, N, L, t, w));
    // Sample points on the grid within the annulus where every window bias is negligible.
    sc.valid_radius = 0.3 * L;
    for (const auto& f : fields) sc.valid_radius = std::min(sc.valid_radius, f.valid_radius);
    if (!(sc.valid_radius > 2.0))
        throw PreconditionError("valid annulus [1, " + std::to_string(sc.valid_radius) +
                                "] is too thin; widen the window");
    std::mt19937_64 rng(12345);
    const double dx = 2.0 * L / N;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::vector<int>> idx;
    std::vector<Point> xs;
    while (static_cast<int>(xs.size()) < points) {
        double r = 1.0 + (sc.valid_radius - 1.0) * U(rng);
        Point dir(static_cast<size_t>(n));
        double s = 0;
        std::normal_distribution<double> G;
        for (double& v : dir) {
            v = G(rng);
            s += v * v;
        }
        std::vector<int> id;
        Point x;
        for (double v : dir) {
            int j = static_cast<int>(std::lround(r * v / std::sqrt(s) / dx)) + N / 2;
            id.push_back(j);
            x.push_back((j - N / 2) * dx);
        }
        idx.push_back(id);
        xs.push_back(x);
    }
    sc.rel_error.assign(times.size(), std::vector<double>(times.size(), 0.0));
    for (size_t a = 0; a < times.size(); ++a)
        for (size_t b = 0; b < times.size(); ++b) {
            if (a == b) continue;
            double ratio = times[b] / times[a];
            double amp = std::pow(ratio, -static_cast<double>(n) / m);
            double sx = std::pow(ratio, -1.0 / m);
            std::vector<double> diff(xs.size()), mag(xs.size());
            parallel_for(xs.size(), [&](size_t i) {
                cplx target = fields[b].at(idx[i]);
                Point y = xs[i];
                for (double& v : y) v *= sx;
                cplx pred = amp * interpolate_field(fields[a], y);
                diff[i] = std::abs(target - pred);
                mag[i] = std::abs(target);
            });
            double dmax = *std::max_element(diff.begin(), diff.end());
            double fmax = *std::max_element(mag.begin(), mag.end());
            sc.rel_error[a][b] = dmax / fmax;
            sc.worst = std::max(sc.worst, sc.rel_error[a][b]);
        }
    return sc;
}

} // namespace schrodlab
