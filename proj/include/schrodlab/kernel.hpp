#pragma once

#include "schrodlab/fit.hpp"
#include "schrodlab/symbol.hpp"

#include <complex>
#include <string>
#include <vector>

namespace schrodlab {

using cplx = std::complex<double>;

// Full: the whole kernel F^{-1}(e^{iP}). FarField: radial cutoff c(t) rising
// from 0 at t=1 to 1 at t=2 (C^4 smoothstep), t = P^{1/m}.
enum class CutoffMode { Full, FarField };

double cutoff_smoothstep(double t);

struct RadialValue {
    cplx value;
    double error = 0.0;
    bool flagged = false;
    std::string reason;
};

// G(b) = int_0^inf t^{n-1} c(t) e^{i(t^m + b t)} dt as an Abel limit; a
// complex b = b_r + i eps gives the e^{-eps t} regularized value.
RadialValue radial_factor(int n, int m, cplx b, CutoffMode mode, double tol = 1e-13);

// Power series of the Full factor, valid for small |b|.
cplx radial_factor_series(int n, int m, cplx b, int terms = 80);

struct OscillatoryPlan {
    Point x;
    double r = 0.0;
    Point eta;
    std::vector<double> eps_schedule{0.5, 0.25, 0.125, 0.0625, 0.03125};
    double rbar = 0.0; // r max <eta, xi> over the surface
    double t0 = 0.0;   // (rbar/m)^{1/(m-1)}
    std::vector<double> splits;
};

OscillatoryPlan make_plan(const PolySymbol& P, const Point& x);

struct KernelOptions {
    CutoffMode mode = CutoffMode::Full;
    double rel_tol = 1e-8;
    int max_nodes = 1 << 16;
    bool eps_diagnostics = false;
    std::vector<double> eps_schedule{0.5, 0.25, 0.125, 0.0625, 0.03125};
};

struct KernelValue {
    cplx value;
    double error = 0.0;
    bool flagged = false;
    std::string reason;
    int nodes = 0;
    // eps diagnostics
    std::vector<cplx> eps_values;
    cplx extrapolated;
    double eps_discrepancy = 0.0;
    bool eps_stabilized = true;
};

// (2 pi)^{-n} int_{S^{n-1}} R^n G(r R <eta,omega>) d omega, R = P(omega)^{-1/m}.
// n = 2 or 3.
KernelValue eval_kernel_surface(const PolySymbol& P, const Point& x,
                                const KernelOptions& opt = {});

struct Window {
    double a = 0.0; // taper starts (in units of |t|^{1/m} phi)
    double b = 0.0; // taper ends
    bool none() const { return b <= 0.0; }
};

struct FieldResult {
    int n = 0;
    int N = 0;
    double L = 0.0;
    double t = 0.0;
    Window window;
    std::vector<cplx> field;      // values at x_j = (j - N/2) dx
    std::vector<cplx> multiplier; // e^{itP} W at xi_k = (k - N/2) dxi
    double plancherel_error = 0.0;
    double outer_max = 0.0;       // max |field| for |x_i| > 0.9 L
    double valid_radius = 0.0;    // below this the window bias is negligible
    double dx() const { return 2.0 * L / N; }
    double dxi() const;
    cplx at(const std::vector<int>& idx) const;
};

// Inverse DFT of e^{itP} W on [-L, L)^n with N points per axis.
FieldResult eval_kernel_fft(const PolySymbol& P, int N, double L, double t, Window w);

// Exact trigonometric interpolation of a FieldResult at an arbitrary point.
cplx interpolate_field(const FieldResult& f, const Point& x);

struct KernelComparison {
    std::vector<Point> points;
    std::vector<cplx> surface, fft;
    std::vector<double> surface_err, fft_err;
    double worst_ratio = 0.0; // max |diff| / combined error
    bool pass = false;
};

KernelComparison compare_evaluators(const PolySymbol& P, int N, double L, Window w1, Window w2,
                                    const std::vector<Point>& points);

struct DecaySample {
    double r;
    int dir;
    cplx value;
    double error;
    bool flagged;
};

struct KernelDecay {
    std::vector<DecaySample> samples;
    DecayFit fit;
    std::vector<Point> directions;
};

KernelDecay fit_decay(const PolySymbol& P, int k, const std::vector<double>& ladder,
                      const std::vector<Point>& directions, double slack = 0.1,
                      const KernelOptions& opt = {});

std::vector<double> dyadic_ladder(double lo, double hi);
// Equispaced directions on the circle; count divisible by 4 includes the axes.
std::vector<Point> circle_directions(int count);

struct ScalingCheck {
    std::vector<double> times;
    std::vector<std::vector<double>> rel_error; // pairwise
    double worst = 0.0;
    double valid_radius = 0.0;
    int points = 0;
};

ScalingCheck check_scaling(const PolySymbol& P, int N, double L, Window rescaled,
                           const std::vector<double>& times, int points = 200);

} // namespace schrodlab
