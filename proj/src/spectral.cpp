#include "schrodlab/spectral.hpp"

#include "schrodlab/error.hpp"
#include "schrodlab/exponents.hpp"
#include "schrodlab/parallel.hpp"
#include "schrodlab/quadrature.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

namespace schrodlab {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

double smooth_inf(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

void unpack(std::size_t off, int n, int N, std::vector<int>& idx) {
    for (int d = n - 1; d >= 0; --d) {
        idx[static_cast<size_t>(d)] = static_cast<int>(off % static_cast<size_t>(N));
        off /= static_cast<size_t>(N);
    }
}

} // namespace

SpectralGrid::SpectralGrid(const PolySymbol& P, int N, double L)
    : P_(P), n_(P.n()), N_(N), L_(L), size_(1) {
    if (N < 4 || (N & (N - 1)) != 0) throw PreconditionError("grid size N must be a power of two >= 4");
    if (!(L > 0)) throw PreconditionError("grid half-width L must be positive");
    for (int d = 0; d < n_; ++d) size_ *= static_cast<size_t>(N);
    fft_ = std::make_unique<FFT>(n_, N);
    table_.resize(size_);
    parallel_for(static_cast<size_t>(N), [&](size_t first) {
        size_t block = size_ / static_cast<size_t>(N);
        for (size_t off = first * block; off < (first + 1) * block; ++off) table_[off] = P_.eval(xi_at(off));
    });
}

double SpectralGrid::dxi() const { return pi / L_; }
double SpectralGrid::nyquist() const { return dxi() * (N_ / 2); }

Point SpectralGrid::x_at(std::size_t off) const {
    std::vector<int> idx(static_cast<size_t>(n_));
    unpack(off, n_, N_, idx);
    Point x(static_cast<size_t>(n_));
    for (int d = 0; d < n_; ++d) x[static_cast<size_t>(d)] = wrap(idx[static_cast<size_t>(d)]) * dx();
    return x;
}

Point SpectralGrid::xi_at(std::size_t off) const {
    std::vector<int> idx(static_cast<size_t>(n_));
    unpack(off, n_, N_, idx);
    Point xi(static_cast<size_t>(n_));
    for (int d = 0; d < n_; ++d) xi[static_cast<size_t>(d)] = wrap(idx[static_cast<size_t>(d)]) * dxi();
    return xi;
}

std::vector<cplx> SpectralGrid::to_freq(std::vector<cplx> u) const {
    fft_->forward(u);
    return u;
}

std::vector<cplx> SpectralGrid::from_freq(std::vector<cplx> v) const {
    fft_->backward(v);
    const double s = 1.0 / static_cast<double>(size_);
    for (auto& z : v) z *= s;
    return v;
}

StateField::StateField(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw Error("state field without a grid");
    if (values_.size() != grid_->size()) throw DimensionError("state field size does not match grid");
}

StateField StateField::from_function(GridPtr grid, const std::function<cplx(const Point&)>& f) {
    std::vector<cplx> v(grid->size());
    for (size_t off = 0; off < v.size(); ++off) v[off] = f(grid->x_at(off));
    return StateField(std::move(grid), std::move(v));
}

StateField StateField::from_spectrum(GridPtr grid, const std::function<cplx(const Point&)>& fhat) {
    std::vector<cplx> v(grid->size());
    for (size_t off = 0; off < v.size(); ++off) v[off] = fhat(grid->xi_at(off));
    auto u = grid->from_freq(std::move(v));
    return StateField(std::move(grid), std::move(u));
}

double StateField::norm(double p) const {
    if (!(p >= 1.0)) throw PreconditionError("norm exponent must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& z : values_) m = std::max(m, std::abs(z));
        return m;
    }
    const double vol = std::pow(grid_->dx(), grid_->n());
    double s = 0.0;
    if (p == 2.0)
        for (const auto& z : values_) s += std::norm(z);
    else if (p == 1.0)
        for (const auto& z : values_) s += std::abs(z);
    else
        for (const auto& z : values_) s += std::pow(std::abs(z), p);
    return std::pow(s * vol, 1.0 / p);
}

StateField StateField::shifted(const std::vector<int>& shift) const {
    const int n = grid_->n(), N = grid_->N();
    if (static_cast<int>(shift.size()) != n) throw DimensionError("shift dimension");
    std::vector<cplx> out(values_.size());
    std::vector<int> idx(static_cast<size_t>(n));
    for (size_t off = 0; off < values_.size(); ++off) {
        unpack(off, n, N, idx);
        size_t to = 0;
        for (int d = 0; d < n; ++d) {
            int j = ((idx[static_cast<size_t>(d)] + shift[static_cast<size_t>(d)]) % N + N) % N;
            to = to * static_cast<size_t>(N) + static_cast<size_t>(j);
        }
        out[to] = values_[off];
    }
    return StateField(grid_, std::move(out));
}

StateField StateField::conj() const {
    std::vector<cplx> v(values_);
    for (auto& z : v) z = std::conj(z);
    return StateField(grid_, std::move(v));
}

double distance(const StateField& a, const StateField& b, double p) {
    if (a.grid() != b.grid()) throw DimensionError("fields live on different grids");
    std::vector<cplx> d(a.values());
    for (size_t i = 0; i < d.size(); ++i) d[i] -= b.values()[i];
    return StateField(a.grid(), std::move(d)).norm(p);
}

Confinement measure_confinement(const StateField& u) {
    const auto& g = *u.grid();
    const int n = g.n();
    Confinement c;
    double tot = 0.0, edge = 0.0;
    for (size_t off = 0; off < g.size(); ++off) {
        double w = std::norm(u.values()[off]);
        tot += w;
        Point x = g.x_at(off);
        for (int d = 0; d < n; ++d)
            if (std::abs(x[static_cast<size_t>(d)]) > 0.9 * g.L()) {
                edge += w;
                break;
            }
    }
    auto v = g.to_freq(u.values());
    double ftot = 0.0, ftail = 0.0;
    const double cut = 0.8 * g.nyquist();
    for (size_t off = 0; off < g.size(); ++off) {
        double w = std::norm(v[off]);
        ftot += w;
        Point xi = g.xi_at(off);
        for (int d = 0; d < n; ++d)
            if (std::abs(xi[static_cast<size_t>(d)]) > cut) {
                ftail += w;
                break;
            }
    }
    c.boundary_mass = tot > 0 ? edge / tot : 0.0;
    c.spectral_tail = ftot > 0 ? ftail / ftot : 0.0;
    return c;
}

StateField apply_multiplier(const StateField& u, const std::function<cplx(double, std::size_t)>& m) {
    const auto& g = *u.grid();
    auto v = g.to_freq(u.values());
    const auto& tab = g.symbol_table();
    for (size_t off = 0; off < v.size(); ++off) v[off] *= m(tab[off], off);
    return StateField(u.grid(), g.from_freq(std::move(v)));
}

StateField apply_table(const StateField& u, const std::vector<cplx>& table) {
    const auto& g = *u.grid();
    if (table.size() != g.size()) throw DimensionError("multiplier table size");
    auto v = g.to_freq(u.values());
    for (size_t off = 0; off < v.size(); ++off) v[off] *= table[off];
    return StateField(u.grid(), g.from_freq(std::move(v)));
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void require_confined(const StateField& u, const char* what) {
    auto c = measure_confinement(u);
    if (c.spectral_tail >= kConfinementBudget || c.boundary_mass >= kConfinementBudget)
        throw PreconditionError(std::string(what) + " is not confined: spectral tail " +
                                sci(c.spectral_tail) + ", boundary mass " + sci(c.boundary_mass) +
                                " (budget 1e-8)");
}

} // namespace

StateField propagate_unchecked(const StateField& u0, double t) {
    if (t == 0.0) return u0;
    return apply_multiplier(u0, [t](double P, size_t) { return std::exp(I * (t * P)); });
}

StateField propagate(const StateField& u0, double t, bool check) {
    if (check) require_confined(u0, "initial state");
    StateField u = propagate_unchecked(u0, t);
    if (check) require_confined(u, "propagated state");
    return u;
}

StateField resolvent_apply(const StateField& f, cplx lambda) {
    if (lambda.real() == 0.0)
        throw PreconditionError("resolvent requires Re lambda != 0 (the spectrum is the imaginary axis)");
    return apply_multiplier(f, [lambda](double P, size_t) { return 1.0 / (lambda - I * P); });
}

namespace {

struct RuleCache {
    std::mutex mu;
    std::map<double, QuadRule> jacobi;
    QuadRule laguerre;
    bool have_laguerre = false;

    const QuadRule& jac(double beta) {
        std::lock_guard<std::mutex> lock(mu);
        auto it = jacobi.find(beta);
        if (it == jacobi.end()) it = jacobi.emplace(beta, gauss_jacobi(64, 0.0, 1.0, 0.0, beta - 1.0)).first;
        return it->second;
    }
    const QuadRule& lag() {
        std::lock_guard<std::mutex> lock(mu);
        if (!have_laguerre) {
            laguerre = gauss_laguerre(64, 0.0);
            have_laguerre = true;
        }
        return laguerre;
    }
};

RuleCache& rules() {
    static RuleCache c;
    return c;
}

} // namespace

cplx integrated_multiplier(double t, double beta, double P) {
    if (!(beta >= 0.0)) throw PreconditionError("integration order beta must be >= 0");
    if (beta == 0.0) return std::exp(I * (t * P));
    if (t < 0.0) return integrated_multiplier(-t, beta, -P);
    if (t == 0.0) return 0.0;
    if (P == 0.0) return std::pow(t, beta) / std::tgamma(beta + 1.0);
    if (P < 0.0) return std::conj(integrated_multiplier(t, beta, -P));
    const double x = t * P;
    if (x <= 40.0) {
        // t^beta / Gamma(beta) int_0^1 w^{beta-1} e^{i x (1-w)} dw
        const auto& r = rules().jac(beta);
        cplx s = 0.0;
        for (size_t k = 0; k < r.x.size(); ++k) s += r.w[k] * std::exp(I * (x * (1.0 - r.x[k])));
        return std::pow(t, beta) / std::tgamma(beta) * s;
    }
    // Contour form: e^{itP} (iP)^{-beta} + i/(P Gamma(beta)) int_0^inf (t - iz/P)^{beta-1} e^{-z} dz
    const auto& r = rules().lag();
    cplx J = 0.0;
    for (size_t k = 0; k < r.x.size(); ++k) J += r.w[k] * std::pow(cplx(t, -r.x[k] / P), beta - 1.0);
    return std::exp(I * x) * std::pow(P, -beta) * std::polar(1.0, -pi * beta / 2.0) +
           I / (P * std::tgamma(beta)) * J;
}

std::vector<cplx> integrated_table(const SpectralGrid& g, double t, double beta) {
    std::vector<cplx> tab(g.size());
    const auto& P = g.symbol_table();
    const size_t chunks = 64;
    parallel_for(chunks, [&](size_t c) {
        size_t lo = tab.size() * c / chunks, hi = tab.size() * (c + 1) / chunks;
        for (size_t off = lo; off < hi; ++off) tab[off] = integrated_multiplier(t, beta, P[off]);
    });
    return tab;
}

StateField integrated_group(const StateField& u0, double t, double beta, bool check) {
    if (check) require_confined(u0, "initial state");
    StateField u = apply_table(u0, integrated_table(*u0.grid(), t, beta));
    if (check) require_confined(u, "integrated state");
    return u;
}

std::vector<Probe> make_probes(const GridPtr& grid, const ProbeOptions& opt) {
    std::vector<Probe> out;
    const int n = grid->n();
    auto r2 = [](const Point& x) {
        double s = 0;
        for (double v : x) s += v * v;
        return s;
    };
    if (opt.cutoff > 0) {
        double c = opt.cutoff;
        out.push_back({"identity", StateField::from_spectrum(grid, [c](const Point& xi) {
                           return cplx(1.0 - smooth_inf((norm2(xi) - c) / (0.5 * c)));
                       })});
    }
    if (opt.include_delta) {
        std::vector<cplx> v(grid->size(), 0.0);
        v[0] = std::pow(grid->dx(), -n);
        out.push_back({"delta", StateField(grid, std::move(v))});
    }
    for (double s : opt.widths)
        out.push_back({"gauss_" + format_number(s), StateField::from_function(grid, [&](const Point& x) {
                           return cplx(std::exp(-r2(x) / (2 * s * s)));
                       })});
    // Modulations along the axes and diagonals.
    std::vector<Point> dirs;
    if (n == 2) {
        for (int k = 0; k < 4; ++k) dirs.push_back({std::cos(k * pi / 4), std::sin(k * pi / 4)});
    } else {
        for (int k = 0; k < 3 && k < n; ++k) {
            Point e(static_cast<size_t>(n), 0.0);
            e[static_cast<size_t>(k)] = 1.0;
            dirs.push_back(e);
        }
        dirs.push_back(Point(static_cast<size_t>(n), 1.0 / std::sqrt(static_cast<double>(n))));
    }
    const double sm = opt.modulated_width;
    for (size_t k = 0; k < dirs.size(); ++k) {
        Point xi0 = dirs[k];
        for (double& v : xi0) v *= opt.modulation;
        out.push_back({"modulated_" + std::to_string(k), StateField::from_function(grid, [&](const Point& x) {
                           return std::exp(-r2(x) / (2 * sm * sm)) * std::exp(I * dot(xi0, x));
                       })});
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int r = 0; r < opt.random_count; ++r) {
        struct Bump {
            Point c, k;
            cplx a;
        };
        std::vector<Bump> bumps(3);
        for (auto& b : bumps) {
            b.c.resize(static_cast<size_t>(n));
            b.k.resize(static_cast<size_t>(n));
            for (auto& v : b.c) v = U(rng) * grid->L() / 8;
            for (auto& v : b.k) v = U(rng) * opt.modulation / std::sqrt(static_cast<double>(n));
            b.a = cplx(U(rng), U(rng));
        }
        out.push_back({"random_" + std::to_string(r), StateField::from_function(grid, [&](const Point& x) {
                           cplx s = 0.0;
                           for (const auto& b : bumps) {
                               Point y = x;
                               for (size_t d = 0; d < y.size(); ++d) y[d] -= b.c[d];
                               s += b.a * std::exp(-r2(y) / (2 * sm * sm)) * std::exp(I * dot(b.k, x));
                           }
                           return s;
                       })});
    }
    return out;
}

namespace {

void check_probes(const GridPtr& grid, const std::vector<Probe>& probes) {
    if (probes.empty()) throw PreconditionError("probe family is empty");
    for (const auto& pr : probes)
        if (pr.field.grid() != grid) throw DimensionError("probe " + pr.name + " lives on another grid");
}

void check_table(const GridPtr& grid, const ExponentTable& table) {
    if (table.n != grid->n() || table.m != grid->symbol().m())
        throw DimensionError("exponent table does not match the grid symbol");
}

DecayFit envelope_fit(const std::vector<ProbeRatio>& ratios, const std::vector<double>& xs) {
    std::vector<double> env(xs.size(), 0.0);
    for (const auto& r : ratios)
        for (size_t i = 0; i < xs.size(); ++i)
            if (r.abscissa == xs[i]) env[i] = std::max(env[i], r.ratio);
    auto lf = fit_loglog(xs, env);
    DecayFit f;
    f.abscissa = xs;
    f.values = env;
    f.slope = lf.slope;
    f.residual = lf.residual;
    f.band = 2.0 * lf.slope_stderr;
    return f;
}

} // namespace

ProbeExperiment dispersive_probe(const GridPtr& grid, const ExponentTable& table, double p,
                                 double q, const std::vector<double>& times,
                                 const std::vector<Probe>& probes, double tolerance) {
    check_table(grid, table);
    check_probes(grid, probes);
    double predicted = dispersive_exponent(table, p, q);
    ProbeExperiment ex;
    for (const auto& pr : probes) {
        double base = pr.field.norm(p);
        for (double t : times) {
            StateField u = propagate(pr.field, t);
            ex.ratios.push_back({t, pr.name, u.norm(q) / base});
        }
    }
    ex.fit = envelope_fit(ex.ratios, times);
    ex.fit.predicted = predicted;
    ex.fit.slack = tolerance;
    ex.fit.pass = std::abs(ex.fit.slope - predicted) <= tolerance;
    return ex;
}

ProbeExperiment resolvent_probe(const GridPtr& grid, const ExponentTable& table, double p,
                                double q, const std::vector<double>& re_lambda, double imag_ratio,
                                const std::vector<Probe>& probes, double tolerance) {
    check_table(grid, table);
    check_probes(grid, probes);
    double predicted = resolvent_exponent(table, p, q);
    ProbeExperiment ex;
    for (const auto& pr : probes) {
        double base = pr.field.norm(p);
        for (double a : re_lambda) {
            StateField u = resolvent_apply(pr.field, cplx(a, imag_ratio * a));
            ex.ratios.push_back({a, pr.name, u.norm(q) / base});
        }
    }
    ex.fit = envelope_fit(ex.ratios, re_lambda);
    ex.fit.predicted = predicted;
    ex.fit.slack = tolerance;
    ex.fit.pass = std::abs(ex.fit.slope - predicted) <= tolerance;
    return ex;
}

ProbeExperiment growth_probe(const GridPtr& grid, double p, double beta,
                             const std::vector<double>& times, const std::vector<Probe>& probes,
                             double slack) {
    check_probes(grid, probes);
    ProbeExperiment ex;
    double np = n_p(grid->n(), p);
    if (!(beta > np))
        ex.warning = "beta = " + format_number(beta) + " does not exceed n_p = " + format_number(np) +
                     "; the growth bound is not expected to hold";
    for (double t : times) {
        auto tab = integrated_table(*grid, t, beta);
        for (const auto& pr : probes) {
            StateField u = apply_table(pr.field, tab);
            require_confined(u, "integrated state");
            ex.ratios.push_back({t, pr.name, u.norm(p) / pr.field.norm(p)});
        }
    }
    ex.fit = envelope_fit(ex.ratios, times);
    ex.fit.predicted = beta;
    ex.fit.slack = slack;
    ex.fit.pass = ex.fit.slope <= beta + slack;
    return ex;
}

StateField laplace_of_group(const StateField& f, cplx lambda, double t_max, int panels,
                            int nodes_per_panel) {
    const auto& g = *f.grid();
    const auto& P = g.symbol_table();
    std::vector<cplx> mult(g.size(), 0.0);
    for (int k = 0; k < panels; ++k) {
        auto r = gauss_legendre(nodes_per_panel, t_max * k / panels, t_max * (k + 1) / panels);
        for (size_t j = 0; j < r.x.size(); ++j) {
            cplx damp = r.w[j] * std::exp(-lambda * r.x[j]);
            for (size_t off = 0; off < mult.size(); ++off) mult[off] += damp * std::exp(I * (r.x[j] * P[off]));
        }
    }
    return apply_table(f, mult);
}

StateField laplace_of_integrated(const StateField& f, double lambda, double beta, double t_max,
                                 int panels, int nodes_per_panel) {
    const auto& g = *f.grid();
    std::vector<cplx> mult(g.size(), 0.0);
    for (int k = 0; k < panels; ++k) {
        auto r = gauss_legendre(nodes_per_panel, t_max * k / panels, t_max * (k + 1) / panels);
        for (size_t j = 0; j < r.x.size(); ++j) {
            auto tab = integrated_table(g, r.x[j], beta);
            double damp = r.w[j] * std::exp(-lambda * r.x[j]);
            for (size_t off = 0; off < mult.size(); ++off) mult[off] += damp * tab[off];
        }
    }
    double scale = std::pow(lambda, beta);
    for (auto& z : mult) z *= scale;
    return apply_table(f, mult);
}

} // namespace schrodlab
