#include "schrodlab/geometry.hpp"

#include "schrodlab/error.hpp"
#include "schrodlab/optimize.hpp"
#include "schrodlab/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <tuple>

namespace schrodlab {

namespace {

constexpr double pi = std::numbers::pi;

Point normalized(Point v) {
    double s = norm2(v);
    for (double& x : v) x /= s;
    return v;
}

void require_elliptic(const PolySymbol& P) {
    auto e = check_elliptic(P, 1024);
    if (!e.elliptic)
        throw PreconditionError("symbol is not elliptic: P = " + std::to_string(e.min_value) +
                                " on the unit sphere");
}

// Unit directions for the eta factor; +eta and -eta give the same sums, so
// only a half sphere is needed.
std::vector<Point> half_sphere(int n, int density) {
    std::vector<Point> out;
    if (n == 2) {
        for (int k = 0; k < density; ++k) {
            double th = pi * k / density;
            out.push_back({std::cos(th), std::sin(th)});
        }
        return out;
    }
    for (auto& d : sphere_samples(n, 2 * density)) {
        bool keep = false;
        for (int i = n - 1; i >= 0; --i) {
            double v = d[static_cast<size_t>(i)];
            if (v != 0.0) {
                keep = v > 0;
                break;
            }
        }
        if (keep) out.push_back(d);
    }
    return out;
}

struct Candidate {
    double value;
    size_t ixi, ieta;
    bool operator<(const Candidate& o) const { return value < o.value; }
};

} // namespace

SurfacePoint surface_point(const PolySymbol& P, const Point& omega) {
    Point w = normalized(omega);
    double pw = P.eval(w);
    if (!(pw > 0))
        throw PreconditionError("P is not positive in direction of the requested surface point");
    double r = std::pow(pw, -1.0 / P.m());
    SurfacePoint sp;
    sp.direction = w;
    sp.xi = w;
    for (double& v : sp.xi) v *= r;
    Point g = P.gradient(sp.xi);
    double gn = norm2(g);
    sp.normal = g;
    for (double& v : sp.normal) v /= gn;
    // grad phi = (1/m) P^{1/m - 1} grad P, and P = 1 on the surface
    sp.grad_phi = gn / P.m() * std::pow(P.eval(sp.xi), 1.0 / P.m() - 1.0);
    return sp;
}

std::vector<SurfacePoint> sample_surface(const PolySymbol& P, int density) {
    require_elliptic(P);
    auto dirs = sphere_samples(P.n(), density);
    std::vector<SurfacePoint> out(dirs.size());
    for (size_t i = 0; i < dirs.size(); ++i) out[i] = surface_point(P, dirs[i]);
    return out;
}

TypeResult detect_type(const PolySymbol& P, int density, double delta_min) {
    require_elliptic(P);
    const int n = P.n(), m = P.m();
    int sdens = density > 0 ? density : (n == 2 ? 2048 : (n == 3 ? 1024 : 512));
    int edens = sdens;
    if (n >= 3) edens = std::max(64, sdens / 2);

    auto dirs = sphere_samples(n, sdens);
    auto etas = half_sphere(n, edens);
    const size_t NX = dirs.size(), NE = etas.size();

    // Flattened per-order index lists: orders j = 1..m.
    std::vector<std::vector<MultiIndex>> idx(static_cast<size_t>(m) + 1);
    for (int j = 1; j <= m; ++j) idx[static_cast<size_t>(j)] = multi_indices(n, j);

    // d[ixi] holds d^alpha P(xi) for all orders, concatenated.
    size_t width = 0;
    for (int j = 1; j <= m; ++j) width += idx[static_cast<size_t>(j)].size();
    std::vector<double> D(NX * width), W(NE * width);
    std::vector<Point> xis(NX);
    for (size_t i = 0; i < NX; ++i) {
        xis[i] = surface_point(P, dirs[i]).xi;
        size_t c = 0;
        for (int j = 1; j <= m; ++j)
            for (const auto& a : idx[static_cast<size_t>(j)]) D[i * width + c++] = P.derivative(a).eval(xis[i]);
    }
    for (size_t e = 0; e < NE; ++e) {
        size_t c = 0;
        for (int j = 1; j <= m; ++j)
            for (const auto& a : idx[static_cast<size_t>(j)]) {
                double w = std::tgamma(j + 1.0);
                for (int i = 0; i < n; ++i) {
                    int ai = a[static_cast<size_t>(i)];
                    w /= std::tgamma(ai + 1.0);
                    for (int q = 0; q < ai; ++q) w *= etas[e][static_cast<size_t>(i)];
                }
                W[e * width + c++] = w;
            }
    }

    // Per-thread chunk of xi rows keeps the 20 smallest sums for each order.
    constexpr size_t keep = 20;
    unsigned chunks = std::max(1u, thread_count());
    using Heap = std::priority_queue<Candidate>;
    std::vector<std::vector<Heap>> heaps(chunks, std::vector<Heap>(static_cast<size_t>(m) + 1));
    parallel_for(chunks, [&](size_t ch) {
        size_t lo = NX * ch / chunks, hi = NX * (ch + 1) / chunks;
        auto& hs = heaps[ch];
        std::vector<double> sums(static_cast<size_t>(m) + 1);
        for (size_t i = lo; i < hi; ++i) {
            const double* d = &D[i * width];
            for (size_t e = 0; e < NE; ++e) {
                const double* w = &W[e * width];
                size_t c = 0;
                double acc = 0.0;
                for (int j = 1; j <= m; ++j) {
                    double s = 0.0;
                    size_t cnt = idx[static_cast<size_t>(j)].size();
                    for (size_t q = 0; q < cnt; ++q, ++c) s += w[c] * d[c];
                    acc += std::abs(s);
                    auto& h = hs[static_cast<size_t>(j)];
                    if (h.size() < keep) h.push({acc, i, e});
                    else if (acc < h.top().value) {
                        h.pop();
                        h.push({acc, i, e});
                    }
                }
            }
        }
    });

    TypeResult res;
    res.surface_density = static_cast<int>(NX);
    res.direction_density = static_cast<int>(NE);
    res.min_by_order.assign(static_cast<size_t>(m), 0.0);

    for (int k = 1; k <= m; ++k) {
        std::vector<Candidate> cand;
        for (auto& hs : heaps) {
            Heap h = hs[static_cast<size_t>(k)];
            while (!h.empty()) {
                cand.push_back(h.top());
                h.pop();
            }
        }
        std::sort(cand.begin(), cand.end());
        if (cand.size() > keep) cand.resize(keep);

        auto objective = [&](const std::vector<double>& v) {
            Point u(v.begin(), v.begin() + n), e(v.begin() + n, v.end());
            if (norm2(u) < 1e-8 || norm2(e) < 1e-8) return 1e300;
            Point xi = surface_point(P, u).xi;
            e = normalized(e);
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += std::abs(P.directional_derivative(xi, e, j));
            return s;
        };
        double best = cand.empty() ? 0.0 : cand[0].value;
        Point bx = xis[cand[0].ixi], be = etas[cand[0].ieta];
        std::vector<MinResult> refined(cand.size());
        parallel_for(cand.size(), [&](size_t c) {
            std::vector<double> x0(dirs[cand[c].ixi]);
            x0.insert(x0.end(), etas[cand[c].ieta].begin(), etas[cand[c].ieta].end());
            refined[c] = nelder_mead(objective, x0, 0.5 * pi / sdens, 1e-12, 1500);
        });
        for (auto& r : refined)
            if (r.f < best) {
                best = r.f;
                Point u(r.x.begin(), r.x.begin() + n), e(r.x.begin() + n, r.x.end());
                bx = surface_point(P, u).xi;
                be = normalized(e);
            }
        res.min_by_order[static_cast<size_t>(k - 1)] = best;
        if (k >= 2 && best > delta_min && !res.found) {
            res.found = true;
            res.k = k;
            res.delta = best;
            break;
        }
        res.witness_xi = bx;
        res.witness_eta = be;
    }
    return res;
}

ConvexResult check_convex(const PolySymbol& P, int density) {
    require_elliptic(P);
    auto pts = sample_surface(P, density);
    const size_t N = pts.size();
    const int n = P.n();
    struct Extreme {
        double lo = 1e300, hi = -1e300;
        size_t lo_i = 0, lo_j = 0, hi_i = 0, hi_j = 0;
    };
    std::vector<Extreme> rows(N);
    parallel_for(N, [&](size_t i) {
        const auto& a = pts[i];
        double base = dot(a.xi, a.normal);
        Extreme ex;
        for (size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (int q = 0; q < n; ++q) s += pts[j].xi[static_cast<size_t>(q)] * a.normal[static_cast<size_t>(q)];
            s -= base; // <zeta - xi, nu(xi)>
            if (s < ex.lo) {
                ex.lo = s;
                ex.lo_i = i;
                ex.lo_j = j;
            }
            if (s > ex.hi) {
                ex.hi = s;
                ex.hi_i = i;
                ex.hi_j = j;
            }
        }
        rows[i] = ex;
    });
    // Outward normals: the surface must lie in {<zeta - xi, nu> <= 0}. The
    // reversed inclusion is checked too, for symmetry.
    Extreme all;
    for (const auto& r : rows) {
        if (r.lo < all.lo) {
            all.lo = r.lo;
            all.lo_i = r.lo_i;
            all.lo_j = r.lo_j;
        }
        if (r.hi > all.hi) {
            all.hi = r.hi;
            all.hi_i = r.hi_i;
            all.hi_j = r.hi_j;
        }
    }
    ConvexResult res;
    res.density = static_cast<int>(N);
    double m_out = -all.hi, m_in = all.lo;
    res.margin = std::max(m_out, m_in);
    res.convex = res.margin >= -kConvexTolerance;
    if (!res.convex) {
        size_t i = m_out >= m_in ? all.hi_i : all.lo_i;
        size_t j = m_out >= m_in ? all.hi_j : all.lo_j;
        res.witness = std::make_pair(pts[i].xi, pts[j].xi);
    }
    return res;
}

double gaussian_curvature(const PolySymbol& P, const Point& xi) {
    const int n = P.n();
    Point g = P.gradient(xi);
    auto H = P.hessian(xi);
    Eigen::MatrixXd B(n + 1, n + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) B(i, j) = H[static_cast<size_t>(i)][static_cast<size_t>(j)];
        B(i, n) = g[static_cast<size_t>(i)];
        B(n, i) = g[static_cast<size_t>(i)];
    }
    B(n, n) = 0.0;
    double gn = norm2(g);
    return -B.determinant() / std::pow(gn, n + 1);
}

namespace {

SurfacePoint support_point_2d(const PolySymbol& P, const Point& eta, int density) {
    auto val = [&](double th) {
        return dot(eta, surface_point(P, {std::cos(th), std::sin(th)}).xi);
    };
    double best = -1e300, bth = 0;
    for (int k = 0; k < density; ++k) {
        double th = 2 * pi * k / density, v = val(th);
        if (v > best) {
            best = v;
            bth = th;
        }
    }
    double h = 2 * pi / density;
    double th = golden_min([&](double t) { return -val(t); }, bth - h, bth, bth + h, 1e-14);
    // Polish: the normal is parallel to eta where cross(grad P, eta) changes sign.
    auto cross = [&](double t) {
        SurfacePoint sp = surface_point(P, {std::cos(t), std::sin(t)});
        return sp.normal[0] * eta[1] - sp.normal[1] * eta[0];
    };
    double a = th - h, b = th + h, fa = cross(a), fb = cross(b);
    if (fa * fb < 0) {
        for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
            double c = 0.5 * (a + b), fc = cross(c);
            if (fc == 0) {
                a = b = c;
                break;
            }
            if ((fc < 0) == (fa < 0)) {
                a = c;
                fa = fc;
            } else
                b = c;
        }
        double c = 0.5 * (a + b);
        if (val(c) >= val(th) - 1e-15) th = c;
    }
    return surface_point(P, {std::cos(th), std::sin(th)});
}

SurfacePoint support_point_nd(const PolySymbol& P, const Point& eta, int density) {
    const int n = P.n();
    auto dirs = sphere_samples(n, density);
    double best = -1e300;
    Point bw;
    for (auto& d : dirs) {
        double v = dot(eta, surface_point(P, d).xi);
        if (v > best) {
            best = v;
            bw = d;
        }
    }
    auto r = nelder_mead(
        [&](const std::vector<double>& u) {
            if (norm2(u) < 1e-8) return 1e300;
            return -dot(eta, surface_point(P, u).xi);
        },
        bw, 0.05, 1e-14, 4000);
    Point xi = surface_point(P, r.x).xi;
    // Newton on grad P(xi) = mu eta, P(xi) = 1.
    double mu = norm2(P.gradient(xi));
    for (int it = 0; it < 30; ++it) {
        Point g = P.gradient(xi);
        auto H = P.hessian(xi);
        Eigen::VectorXd F(n + 1);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int i = 0; i < n; ++i) {
            F(i) = g[static_cast<size_t>(i)] - mu * eta[static_cast<size_t>(i)];
            for (int j = 0; j < n; ++j) J(i, j) = H[static_cast<size_t>(i)][static_cast<size_t>(j)];
            J(i, n) = -eta[static_cast<size_t>(i)];
            J(n, i) = g[static_cast<size_t>(i)];
        }
        F(n) = P.eval(xi) - 1.0;
        if (F.norm() < 1e-14 * mu) break;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) break;
        Eigen::VectorXd dx = lu.solve(F);
        Point cand = xi;
        for (int i = 0; i < n; ++i) cand[static_cast<size_t>(i)] -= dx(i);
        double cmu = mu - dx(n);
        // Accept only steps that keep the residual decreasing.
        Point cg = P.gradient(cand);
        double cr = std::abs(P.eval(cand) - 1.0);
        for (int i = 0; i < n; ++i) {
            double v = cg[static_cast<size_t>(i)] - cmu * eta[static_cast<size_t>(i)];
            cr = std::hypot(cr, v);
        }
        if (!(cr < F.norm())) break;
        xi = cand;
        mu = cmu;
    }
    return surface_point(P, xi);
}

} // namespace

SupportPoints gauss_map_inverse(const PolySymbol& P, const Point& eta_in,
                                const ConvexResult* certified) {
    if (static_cast<int>(eta_in.size()) != P.n()) throw DimensionError("direction dimension");
    if (std::abs(norm2(eta_in) - 1.0) > 1e-12)
        throw PreconditionError("gauss_map_inverse: direction must be a unit vector");
    ConvexResult local;
    if (!certified) {
        local = check_convex(P, P.n() == 2 ? 1024 : 512);
        certified = &local;
    }
    if (!certified->convex)
        throw PreconditionError(
            "gauss_map_inverse: surface is not convex (support margin " +
            std::to_string(certified->margin) + "); the Gauss map is not invertible");
    const int dens = P.n() == 2 ? 4096 : 4096;
    Point neg = eta_in;
    for (double& v : neg) v = -v;
    SupportPoints out;
    if (P.n() == 2) {
        out.plus = support_point_2d(P, eta_in, dens);
        out.minus = support_point_2d(P, neg, dens);
    } else {
        out.plus = support_point_nd(P, eta_in, dens);
        out.minus = support_point_nd(P, neg, dens);
    }
    double c = std::clamp(dot(out.plus.normal, eta_in), -1.0, 1.0);
    double cm = std::clamp(dot(out.minus.normal, neg), -1.0, 1.0);
    // acos loses precision near 1; use the norm of the difference instead.
    auto ang = [](const Point& a, const Point& b) {
        Point d = a;
        for (size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
        return 2.0 * std::asin(std::min(1.0, 0.5 * norm2(d)));
    };
    (void)c;
    (void)cm;
    out.normal_angle_error = std::max(ang(out.plus.normal, eta_in), ang(out.minus.normal, neg));
    out.support_identity_error = std::abs(dot(eta_in, out.plus.xi) * out.plus.grad_phi - 1.0);
    return out;
}

SurfaceReport analyze_surface(const PolySymbol& P, int density, double delta_min) {
    SurfaceReport rep;
    auto e = check_elliptic(P);
    rep.elliptic_min = e.min_value;
    if (!e.elliptic)
        throw PreconditionError("symbol is not elliptic: min over the sphere is " +
                                std::to_string(e.min_value));
    rep.classical = P.classical();
    rep.density = density;
    auto t = detect_type(P, density, delta_min);
    rep.type_found = t.found;
    rep.k = t.k;
    rep.delta = t.delta;
    auto c = check_convex(P, density);
    rep.convex = c.convex;
    rep.margin = c.margin;
    for (auto& sp : sample_surface(P, density))
        if (std::abs(gaussian_curvature(P, sp.xi)) < kCurvatureZero) rep.curvature_zeros.push_back(sp.xi);
    return rep;
}

} // namespace schrodlab
