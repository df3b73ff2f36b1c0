#include "schrodlab/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <memory>

namespace schrodlab {

namespace {

using VecFn = std::function<double(const std::vector<double>&)>;

double nm_trampoline(const gsl_vector* v, void* params) {
    auto* fn = static_cast<const VecFn*>(params);
    std::vector<double> x(v->size);
    for (size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
    double r = (*fn)(x);
    return std::isfinite(r) ? r : GSL_POSINF;
}

double golden_trampoline(double x, void* params) {
    return (*static_cast<const std::function<double(double)>*>(params))(x);
}

} // namespace

MinResult nelder_mead(const VecFn& f, std::vector<double> x0, double step, double size_tol,
                      int max_iter) {
    gsl_set_error_handler_off();
    const size_t d = x0.size();
    MinResult out;
    if (d == 0) {
        out.f = f(x0);
        return out;
    }
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(d),
                                                              &gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(d),
                                                               &gsl_vector_free);
    for (size_t i = 0; i < d; ++i) gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set_all(ss.get(), step);
    gsl_multimin_function fn{&nm_trampoline, d, const_cast<VecFn*>(&f)};
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d),
        &gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());
    int it = 0;
    for (; it < max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tol) ==
            GSL_SUCCESS)
            break;
    }
    out.x.resize(d);
    for (size_t i = 0; i < d; ++i) out.x[i] = gsl_vector_get(s->x, i);
    out.f = s->fval;
    out.iterations = it;
    return out;
}

double golden_min(const std::function<double(double)>& f, double a, double guess, double b,
                  double tol, int max_iter) {
    gsl_set_error_handler_off();
    double fa = f(a), fb = f(b), fg = f(guess);
    // GSL requires f(guess) below both ends; fall back to the best endpoint.
    if (!(fg < fa && fg < fb)) return fa < fb ? (fa < fg ? a : guess) : (fb < fg ? b : guess);
    gsl_function fn{&golden_trampoline, const_cast<std::function<double(double)>*>(&f)};
    std::unique_ptr<gsl_min_fminimizer, decltype(&gsl_min_fminimizer_free)> s(
        gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection), &gsl_min_fminimizer_free);
    if (gsl_min_fminimizer_set_with_values(s.get(), &fn, guess, fg, a, fa, b, fb) != GSL_SUCCESS)
        return guess;
    for (int i = 0; i < max_iter; ++i) {
        if (gsl_min_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        double lo = gsl_min_fminimizer_x_lower(s.get());
        double hi = gsl_min_fminimizer_x_upper(s.get());
        if (gsl_min_test_interval(lo, hi, tol, 0.0) == GSL_SUCCESS) break;
    }
    return gsl_min_fminimizer_x_minimum(s.get());
}

} // namespace schrodlab
