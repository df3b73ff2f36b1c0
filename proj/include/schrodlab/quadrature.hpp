#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace schrodlab {

using cplx = std::complex<double>;

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Fixed rules (GSL node generators).
QuadRule gauss_legendre(int n, double a, double b);
// weight (b-x)^alpha (x-a)^beta on [a,b]
QuadRule gauss_jacobi(int n, double a, double b, double alpha, double beta);
// weight x^alpha e^{-x} on [0,inf)
QuadRule gauss_laguerre(int n, double alpha);

struct QuadResult {
    cplx value{};
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod (7/15) for a complex integrand along a real parameter.
QuadResult integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_panels = 2000);

} // namespace schrodlab
