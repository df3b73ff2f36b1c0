#pragma once

#include "schrodlab/exponents.hpp"
#include "schrodlab/spectral.hpp"

#include <string>
#include <vector>

namespace schrodlab {

// V = V1 + V2 on a grid, with V_j declared in L^{s_j}.
struct PotentialSpec {
    std::string kind; // gaussian_bump, grid_file, inverse_power
    GridPtr grid;
    std::vector<cplx> V1, V2;
    double s1 = kInf, s2 = kInf;
    double norm1 = 0.0, norm2 = 0.0; // discrete L^{s_j} norms
    bool singular = false;            // excluded from acceptance runs
    std::string description;

    std::vector<cplx> total() const;
    bool is_zero() const;
    double sup_real() const;
    double sup_abs() const;
};

PotentialSpec gaussian_bump(GridPtr grid, cplx amplitude, double width, Point center = {},
                            double s = kInf);
// A |x|^{-a}, split at |x| = 1 into V1 (inside) and V2 (outside). Flagged singular.
PotentialSpec inverse_power(GridPtr grid, cplx amplitude, double a, double s1, double s2);
PotentialSpec grid_potential(GridPtr grid, std::vector<cplx> V1, std::vector<cplx> V2, double s1,
                             double s2, std::string kind = "grid_file");

double discrete_norm(const GridPtr& grid, const std::vector<cplx>& v, double s);

struct GateVerdict {
    bool admissible = false;
    std::string reason;
    Interval I_prime;
    Interval window; // I'_p intersected with (n/m, inf]
    bool special_applicable = false;
    double special_s = 0.0;
    bool special_admissible = false;
    std::string special_note;
    bool dual_route = false; // p > 2
    std::string dual_note;
};

GateVerdict admissibility_gate(double p, double s1, double s2, const ExponentTable& table);

// Estimate of |V R0(lambda)|_{L^p -> L^p} on the grid.
struct ContractionEstimate {
    cplx lambda;
    double gamma = 0.0;
    int iterations = 0;
    std::string method;
};

ContractionEstimate contraction_estimate(const PotentialSpec& V, cplx lambda, double p);

struct OmegaSearch {
    double omega = 0.0; // smallest Re lambda (to bisection tolerance) with gamma < 1/2
    std::vector<ContractionEstimate> ladder;
};

// imag_ratio fixes Im lambda = imag_ratio * Re lambda along the search.
OmegaSearch find_omega(const PotentialSpec& V, double p, double imag_ratio = 0.0,
                       double threshold = 0.5);

struct GmresResult {
    StateField u;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// Direct grid solve of (lambda - iP(D) - V) u = f, preconditioned by R0(lambda).
GmresResult direct_solve(const PotentialSpec& V, const StateField& f, cplx lambda,
                         double tol = 1e-13, int restart = 60, int max_iter = 600);

// |(lambda - iP(D) - V) u - f|_2 / |f|_2
double perturbed_residual(const PotentialSpec& V, const StateField& u, const StateField& f,
                          cplx lambda);

struct BornSeriesResult {
    cplx lambda;
    double p = 2.0;
    double gamma = 0.0;
    int terms = 0;
    std::vector<double> increments; // relative L2 size of each added term
    StateField u;
    double residual = 0.0;      // of the series sum
    StateField direct;
    double direct_residual = 0.0;
    double agreement = 0.0;     // |u - direct|_2 / |direct|_2
    bool accepted = false;
    std::string diagnostic;
};

constexpr double kBornIncrement = 1e-10;
constexpr int kBornMaxTerms = 200;
constexpr double kBornResidual = 1e-8;

// Refuses when the gate rejects (V.s1, V.s2) or the measured gamma >= 1/2.
BornSeriesResult born_resolvent(const PotentialSpec& V, const StateField& f, cplx lambda, double p,
                                const ExponentTable& table);

// Strang splitting with exact sub-steps; fixed step count, no checks.
StateField strang(const PotentialSpec& V, const StateField& u0, double t, int steps);

struct EvolveResult {
    StateField u;
    int steps = 0;
    double dt = 0.0;
    double doubling_change = 0.0; // |u_dt - u_{dt/2}|_2 / |u_{dt/2}|_2
};

constexpr double kStepDoubling = 1e-6;

// Confinement and step-doubling controlled evolution for u_t = (iP(D) + V) u.
EvolveResult evolve(const PotentialSpec& V, const StateField& u0, double t, double dt);

struct OrderFit {
    std::vector<double> dts;
    std::vector<double> errors; // against the step-halved run
    double slope = 0.0;
    double residual = 0.0;
};

OrderFit strang_order(const PotentialSpec& V, const StateField& u0, double t,
                      const std::vector<double>& dts);

// First and second Born terms of the Duhamel expansion by Gauss-Legendre in time.
StateField duhamel_first(const PotentialSpec& V, const StateField& u0, double t, int nodes = 16);
StateField duhamel_second(const PotentialSpec& V, const StateField& u0, double t, int nodes = 12);

struct DuhamelCheck {
    std::vector<double> times;
    std::vector<double> errors; // |evolve - (free + first + second)|_2 / |u0|_2
    std::vector<double> ratios; // errors / t^3
    double spread = 0.0;        // max ratio / min ratio
    bool stabilized = false;
};

DuhamelCheck duhamel_check(const PotentialSpec& V, const StateField& u0,
                           const std::vector<double>& times);

struct GrowthReport {
    double p = 2.0;
    double beta = 0.0;
    std::vector<double> times;
    std::vector<double> envelope; // max over probes of |u(t)|_p / proxy(u0)
    std::vector<std::string> probe_names;
    std::vector<std::vector<double>> ratios; // [probe][time]
    double omega_fit = 0.0;       // slope of log envelope against t
    double intercept = 0.0;
    double max_second_difference = 0.0;      // of log envelope, whole window
    double late_second_difference = 0.0;     // t >= t_max / 2
    double max_rate = 0.0;                   // largest local slope of log envelope
    bool concave = false;                    // whole window
    bool late_concave = false;               // second half of the window
    bool finite = false;
    double gronwall_rate = 0.0;   // sup Re V
    std::string proxy_note;
};

GrowthReport growth_check(const PotentialSpec& V, double p, double beta,
                          const std::vector<double>& times, const std::vector<Probe>& probes,
                          const ExponentTable& table, double dt = 1.0 / 32.0);

} // namespace schrodlab
