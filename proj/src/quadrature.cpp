#include "schrodlab/quadrature.hpp"

#include "schrodlab/error.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

namespace schrodlab {

namespace {

QuadRule fixed_rule(const gsl_integration_fixed_type* type, int n, double a, double b,
                    double alpha, double beta) {
    gsl_set_error_handler_off();
    std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
        gsl_integration_fixed_alloc(type, static_cast<size_t>(n), a, b, alpha, beta),
        &gsl_integration_fixed_free);
    if (!ws) throw Error("quadrature: could not build fixed rule");
    QuadRule r;
    r.x.assign(gsl_integration_fixed_nodes(ws.get()), gsl_integration_fixed_nodes(ws.get()) + n);
    r.w.assign(gsl_integration_fixed_weights(ws.get()),
               gsl_integration_fixed_weights(ws.get()) + n);
    return r;
}

// Kronrod 15-point nodes/weights and the embedded Gauss 7-point weights.
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    cplx value;
    double error;
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx fc = f(c);
    cplx rk = fc * wgk[7];
    cplx rg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * xgk[j];
        cplx s = f(c - dx) + f(c + dx);
        rk += wgk[j] * s;
        if (j % 2 == 1) rg += wg[j / 2] * s;
    }
    return {rk * h, std::abs((rk - rg) * h)};
}

} // namespace

QuadRule gauss_legendre(int n, double a, double b) {
    return fixed_rule(gsl_integration_fixed_legendre, n, a, b, 0.0, 0.0);
}

QuadRule gauss_jacobi(int n, double a, double b, double alpha, double beta) {
    return fixed_rule(gsl_integration_fixed_jacobi, n, a, b, alpha, beta);
}

QuadRule gauss_laguerre(int n, double alpha) {
    return fixed_rule(gsl_integration_fixed_laguerre, n, 0.0, 1.0, alpha, 0.0);
}

QuadResult integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_panels) {
    QuadResult out;
    if (a == b) return out;
    // Global adaptive scheme: always bisect the panel with the largest error.
    struct Item {
        double lo, hi;
        Panel p;
        bool operator<(const Item& o) const { return p.error < o.p.error; }
    };
    std::priority_queue<Item> heap;
    Panel whole = gk15(f, a, b);
    heap.push({a, b, whole});
    cplx total = whole.value;
    double err = whole.error;
    int evals = 15;
    const double round_floor = 50.0 * std::numeric_limits<double>::epsilon();
    while (static_cast<int>(heap.size()) < max_panels) {
        double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (err <= tol) break;
        Item it = heap.top();
        // Panels already at round-off cannot be improved further.
        if (it.p.error <= round_floor * std::abs(it.p.value) ||
            std::abs(it.hi - it.lo) < 1e-14 * std::abs(b - a))
            break;
        heap.pop();
        double c = 0.5 * (it.lo + it.hi);
        Panel l = gk15(f, it.lo, c), r = gk15(f, c, it.hi);
        evals += 30;
        total += l.value + r.value - it.p.value;
        err += l.error + r.error - it.p.error;
        heap.push({it.lo, c, l});
        heap.push({c, it.hi, r});
    }
    // Re-sum to drop accumulated cancellation in the running totals.
    total = 0.0;
    err = 0.0;
    int count = static_cast<int>(heap.size());
    while (!heap.empty()) {
        total += heap.top().p.value;
        err += heap.top().p.error;
        heap.pop();
    }
    out.value = total;
    out.error = err;
    out.evaluations = evals;
    out.converged = err <= std::max(abs_tol, rel_tol * std::abs(total)) || count < max_panels;
    return out;
}

} // namespace schrodlab
