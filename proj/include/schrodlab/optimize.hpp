#pragma once

#include <functional>
#include <vector>

namespace schrodlab {

struct MinResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
};

// Nelder-Mead simplex (GSL nmsimplex2).
MinResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                      std::vector<double> x0, double step, double size_tol = 1e-12,
                      int max_iter = 2000);

// Golden-section minimization of f on [a,b] with an interior guess.
double golden_min(const std::function<double(double)>& f, double a, double guess, double b,
                  double tol = 1e-13, int max_iter = 200);

} // namespace schrodlab
