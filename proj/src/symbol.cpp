#include "schrodlab/symbol.hpp"

#include "schrodlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace schrodlab {

namespace {

bool glex_before(const MultiIndex& a, const MultiIndex& b) {
    int da = 0, db = 0;
    for (int v : a) da += v;
    for (int v : b) db += v;
    if (da != db) return da > db;
    return a > b;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

void enumerate(int n, int d, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos == n - 1) {
        cur[static_cast<size_t>(pos)] = d;
        out.push_back(cur);
        return;
    }
    for (int v = d; v >= 0; --v) {
        cur[static_cast<size_t>(pos)] = v;
        enumerate(n, d - v, pos + 1, cur, out);
    }
}

} // namespace

double norm2(const Point& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double dot(const Point& a, const Point& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<MultiIndex> multi_indices(int n, int d) {
    std::vector<MultiIndex> out;
    if (n <= 0 || d < 0) return out;
    MultiIndex cur(static_cast<size_t>(n), 0);
    enumerate(n, d, 0, cur, out);
    return out;
}

HomogeneousPolynomial::HomogeneousPolynomial(int n, int degree, std::vector<Term> terms)
    : n_(n), degree_(degree) {
    std::map<MultiIndex, double> merged;
    for (auto& t : terms) {
        if (static_cast<int>(t.alpha.size()) != n)
            throw DimensionError("polynomial term has " + std::to_string(t.alpha.size()) +
                                 " exponents, expected " + std::to_string(n));
        int deg = 0;
        for (int a : t.alpha) {
            if (a < 0) throw Error("polynomial term has a negative exponent");
            deg += a;
        }
        if (deg != degree)
            throw Error("polynomial term of degree " + std::to_string(deg) +
                        " in a homogeneous polynomial of degree " + std::to_string(degree));
        merged[t.alpha] += t.c;
    }
    for (auto& [a, c] : merged)
        if (c != 0.0) terms_.push_back({a, c});
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return glex_before(x.alpha, y.alpha); });
}

double HomogeneousPolynomial::eval(const Point& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw DimensionError("point has dimension " + std::to_string(x.size()) + ", expected " +
                             std::to_string(n_));
    double s = 0.0;
    for (const auto& t : terms_) {
        double v = t.c;
        for (int i = 0; i < n_; ++i) {
            int e = t.alpha[static_cast<size_t>(i)];
            double xi = x[static_cast<size_t>(i)];
            for (int k = 0; k < e; ++k) v *= xi;
        }
        s += v;
    }
    return s;
}

HomogeneousPolynomial HomogeneousPolynomial::derivative(const MultiIndex& alpha) const {
    if (static_cast<int>(alpha.size()) != n_) throw DimensionError("derivative index length");
    int order = 0;
    for (int a : alpha) order += a;
    if (order > degree_) return HomogeneousPolynomial(n_, 0, {});
    std::vector<Term> out;
    for (const auto& t : terms_) {
        Term d{t.alpha, t.c};
        bool zero = false;
        for (int i = 0; i < n_ && !zero; ++i) {
            int e = t.alpha[static_cast<size_t>(i)], a = alpha[static_cast<size_t>(i)];
            if (a > e) {
                zero = true;
                break;
            }
            for (int k = 0; k < a; ++k) d.c *= static_cast<double>(e - k);
            d.alpha[static_cast<size_t>(i)] = e - a;
        }
        if (!zero) out.push_back(std::move(d));
    }
    return HomogeneousPolynomial(n_, degree_ - order, std::move(out));
}

PolySymbol::PolySymbol(int n, int m, std::vector<Term> terms)
    : n_(n), m_(m), zero_(n, 0, {}) {
    if (n < 2) throw Error("symbol dimension must be at least 2 (got " + std::to_string(n) + ")");
    if (m < 2 || m % 2 != 0)
        throw Error("symbol degree must be an even integer >= 2 (got " + std::to_string(m) + ")");
    p_ = HomogeneousPolynomial(n, m, std::move(terms));
    if (p_.is_zero()) throw Error("symbol has no nonzero terms");
    for (int d = 0; d <= m; ++d)
        for (const auto& a : multi_indices(n, d)) table_.emplace(a, p_.derivative(a));
    contraction_.resize(static_cast<size_t>(m) + 1);
    for (int j = 0; j <= m; ++j)
        for (const auto& a : multi_indices(n, j)) {
            double w = factorial(j);
            for (int v : a) w /= factorial(v);
            contraction_[static_cast<size_t>(j)].push_back({a, w});
        }
}

void PolySymbol::check_dim(const Point& xi) const {
    if (static_cast<int>(xi.size()) != n_)
        throw DimensionError("point has dimension " + std::to_string(xi.size()) +
                             ", symbol has n=" + std::to_string(n_));
}

double PolySymbol::eval(const Point& xi) const {
    check_dim(xi);
    return p_.eval(xi);
}

const HomogeneousPolynomial& PolySymbol::derivative(const MultiIndex& alpha) const {
    if (static_cast<int>(alpha.size()) != n_) throw DimensionError("derivative index length");
    auto it = table_.find(alpha);
    return it == table_.end() ? zero_ : it->second;
}

Point PolySymbol::gradient(const Point& xi) const {
    check_dim(xi);
    Point g(static_cast<size_t>(n_));
    MultiIndex a(static_cast<size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) {
        a[static_cast<size_t>(i)] = 1;
        g[static_cast<size_t>(i)] = derivative(a).eval(xi);
        a[static_cast<size_t>(i)] = 0;
    }
    return g;
}

std::vector<Point> PolySymbol::hessian(const Point& xi) const {
    check_dim(xi);
    std::vector<Point> H(static_cast<size_t>(n_), Point(static_cast<size_t>(n_)));
    MultiIndex a(static_cast<size_t>(n_), 0);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
            a[static_cast<size_t>(i)] += 1;
            a[static_cast<size_t>(j)] += 1;
            double v = derivative(a).eval(xi);
            H[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
            H[static_cast<size_t>(j)][static_cast<size_t>(i)] = v;
            a[static_cast<size_t>(i)] = 0;
            a[static_cast<size_t>(j)] = 0;
        }
    return H;
}

double PolySymbol::directional_derivative(const Point& xi, const Point& eta, int j) const {
    check_dim(xi);
    check_dim(eta);
    if (std::abs(norm2(eta) - 1.0) > 1e-12)
        throw PreconditionError("direction must be a unit vector (|eta| = " +
                                std::to_string(norm2(eta)) + ")");
    if (j < 0) throw Error("derivative order must be non-negative");
    if (j > m_) return 0.0;
    double s = 0.0;
    for (const auto& [a, w] : contraction_[static_cast<size_t>(j)]) {
        double e = w;
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < a[static_cast<size_t>(i)]; ++k) e *= eta[static_cast<size_t>(i)];
        if (e != 0.0) s += e * derivative(a).eval(xi);
    }
    return s;
}

double PolySymbol::phi(const Point& xi) const {
    return std::pow(eval(xi), 1.0 / static_cast<double>(m_));
}

PolySymbol PolySymbol::negated() const { return scaled(-1.0); }

PolySymbol PolySymbol::scaled(double s) const {
    std::vector<Term> t = p_.terms();
    for (auto& x : t) x.c *= s;
    return PolySymbol(n_, m_, std::move(t));
}

std::string PolySymbol::describe() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& t : p_.terms()) {
        if (!first) os << (t.c < 0 ? " - " : " + ");
        else if (t.c < 0) os << "-";
        first = false;
        double c = std::abs(t.c);
        bool unit = (c == 1.0);
        if (!unit) os << c;
        bool any = false;
        for (int i = 0; i < n_; ++i) {
            int e = t.alpha[static_cast<size_t>(i)];
            if (e == 0) continue;
            if (!unit || any) os << "*";
            os << "x" << (i + 1);
            if (e > 1) os << "^" << e;
            any = true;
        }
        if (!any && unit) os << "1";
    }
    return os.str();
}

std::vector<Point> sphere_samples(int n, int density) {
    if (n < 2) throw Error("sphere_samples: n must be >= 2");
    if (density < 8) throw PreconditionError("sphere sampling density must be >= 8");
    std::vector<Point> out;
    const double pi = std::numbers::pi;
    if (n == 2) {
        out.reserve(static_cast<size_t>(density));
        for (int k = 0; k < density; ++k) {
            double th = 2.0 * pi * k / density;
            out.push_back({std::cos(th), std::sin(th)});
        }
        return out;
    }
    if (n == 3) {
        const double ga = pi * (3.0 - std::sqrt(5.0));
        out.reserve(static_cast<size_t>(density));
        for (int k = 0; k < density; ++k) {
            double z = 1.0 - (2.0 * k + 1.0) / density;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double th = ga * k;
            out.push_back({r * std::cos(th), r * std::sin(th), z});
        }
        return out;
    }
    // Hyperspherical angles: n-2 polar angles in (0,pi), one azimuth.
    int per = std::max(4, static_cast<int>(std::lround(std::pow(density, 1.0 / (n - 1)))));
    std::vector<int> idx(static_cast<size_t>(n - 1), 0);
    for (;;) {
        Point x(static_cast<size_t>(n));
        double s = 1.0;
        for (int a = 0; a < n - 2; ++a) {
            double th = pi * (idx[static_cast<size_t>(a)] + 0.5) / per;
            x[static_cast<size_t>(a)] = s * std::cos(th);
            s *= std::sin(th);
        }
        double az = 2.0 * pi * idx[static_cast<size_t>(n - 2)] / (2 * per);
        x[static_cast<size_t>(n - 2)] = s * std::cos(az);
        x[static_cast<size_t>(n - 1)] = s * std::sin(az);
        out.push_back(std::move(x));
        int a = 0;
        for (; a < n - 1; ++a) {
            int lim = (a == n - 2) ? 2 * per : per;
            if (++idx[static_cast<size_t>(a)] < lim) break;
            idx[static_cast<size_t>(a)] = 0;
        }
        if (a == n - 1) break;
    }
    // Coordinate axes are always included.
    for (int i = 0; i < n; ++i)
        for (double sgn : {1.0, -1.0}) {
            Point e(static_cast<size_t>(n), 0.0);
            e[static_cast<size_t>(i)] = sgn;
            out.push_back(std::move(e));
        }
    return out;
}

EllipticReport check_elliptic(const PolySymbol& P, int density) {
    if (density < 64) throw PreconditionError("check_elliptic: density must be >= 64");
    auto dirs = sphere_samples(P.n(), density);
    std::vector<std::pair<double, size_t>> vals(dirs.size());
    for (size_t i = 0; i < dirs.size(); ++i) vals[i] = {P.eval(dirs[i]), i};
    size_t worst = std::min<size_t>(10, vals.size());
    std::partial_sort(vals.begin(), vals.begin() + static_cast<long>(worst), vals.end());

    EllipticReport rep;
    rep.density = density;
    rep.min_value = vals[0].first;
    rep.argmin = dirs[vals[0].second];
    // Projected gradient descent on the sphere with backtracking.
    for (size_t s = 0; s < worst; ++s) {
        Point w = dirs[vals[s].second];
        double f = vals[s].first;
        double step = 0.1;
        for (int it = 0; it < 50; ++it) {
            Point g = P.gradient(w);
            double gw = dot(g, w);
            for (size_t i = 0; i < g.size(); ++i) g[i] -= gw * w[i];
            double gn = norm2(g);
            if (gn < 1e-15) break;
            bool moved = false;
            while (step > 1e-14) {
                Point c = w;
                for (size_t i = 0; i < c.size(); ++i) c[i] -= step * g[i] / gn;
                double cn = norm2(c);
                for (double& v : c) v /= cn;
                double fc = P.eval(c);
                if (fc < f) {
                    w = c;
                    f = fc;
                    step *= 1.5;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        if (f < rep.min_value) {
            rep.min_value = f;
            rep.argmin = w;
        }
    }
    rep.elliptic = rep.min_value > 0.0;
    return rep;
}

PolySymbol normalize_sign(const PolySymbol& P, bool* flipped) {
    auto dirs = sphere_samples(P.n(), 256);
    bool all_neg = true;
    for (const auto& d : dirs)
        if (P.eval(d) >= 0.0) {
            all_neg = false;
            break;
        }
    if (flipped) *flipped = all_neg;
    return all_neg ? P.negated() : P;
}

} // namespace schrodlab
