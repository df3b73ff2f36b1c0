#pragma once

#include "schrodlab/fft.hpp"
#include "schrodlab/fit.hpp"
#include "schrodlab/symbol.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace schrodlab {

using cplx = std::complex<double>;

// Periodic grid on [-L, L)^n with N points per axis. Arrays are stored in
// FFT order: index j maps to x = j dx for j < N/2 and (j - N) dx otherwise;
// the same wrap applies to frequencies with spacing pi / L.
class SpectralGrid {
public:
    SpectralGrid(const PolySymbol& P, int N, double L);

    int n() const { return n_; }
    int N() const { return N_; }
    double L() const { return L_; }
    double dx() const { return 2.0 * L_ / N_; }
    double dxi() const;
    double nyquist() const;
    std::size_t size() const { return size_; }
    const PolySymbol& symbol() const { return P_; }
    // P at every frequency node
    const std::vector<double>& symbol_table() const { return table_; }

    Point x_at(std::size_t off) const;
    Point xi_at(std::size_t off) const;
    int wrap(int j) const { return j < N_ / 2 ? j : j - N_; }

    std::vector<cplx> to_freq(std::vector<cplx> u) const;
    std::vector<cplx> from_freq(std::vector<cplx> v) const;

    const FFT& fft() const { return *fft_; }

private:
    PolySymbol P_;
    int n_;
    int N_;
    double L_;
    std::size_t size_;
    std::vector<double> table_;
    std::unique_ptr<FFT> fft_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

class StateField {
public:
    StateField() = default;
    StateField(GridPtr grid, std::vector<cplx> values);
    static StateField from_function(GridPtr grid, const std::function<cplx(const Point&)>& f);
    static StateField from_spectrum(GridPtr grid, const std::function<cplx(const Point&)>& fhat);

    const GridPtr& grid() const { return grid_; }
    const std::vector<cplx>& values() const { return values_; }
    std::vector<cplx>& values() { return values_; }

    // (sum |u|^p dx^n)^{1/p}; max for p = inf
    double norm(double p) const;
    // translate by integer grid shifts (periodic)
    StateField shifted(const std::vector<int>& shift) const;
    StateField conj() const;

private:
    GridPtr grid_;
    std::vector<cplx> values_;
};

double distance(const StateField& a, const StateField& b, double p = 2.0);

struct Confinement {
    double spectral_tail = 0.0; // fraction of L2 mass with some |xi_i| > 0.8 Nyquist
    double boundary_mass = 0.0; // fraction of L2 mass with some |x_i| > 0.9 L
};

constexpr double kConfinementBudget = 1e-8;

Confinement measure_confinement(const StateField& u);

// Multiplies in frequency space; m receives (P(xi), offset).
StateField apply_multiplier(const StateField& u, const std::function<cplx(double, std::size_t)>& m);
StateField apply_table(const StateField& u, const std::vector<cplx>& table);

StateField propagate(const StateField& u0, double t, bool check = true);
StateField propagate_unchecked(const StateField& u0, double t);

StateField resolvent_apply(const StateField& f, cplx lambda);

// (1/Gamma(beta)) int_0^t (t-s)^{beta-1} e^{isP} ds; beta = 0 gives e^{itP}.
cplx integrated_multiplier(double t, double beta, double P);
std::vector<cplx> integrated_table(const SpectralGrid& g, double t, double beta);
StateField integrated_group(const StateField& u0, double t, double beta, bool check = true);

// Probe family used by the scaling experiments.
struct Probe {
    std::string name;
    StateField field;
};

struct ProbeOptions {
    double cutoff = 1.0;                  // band-limited identity: taper over [c, 1.5c]
    std::vector<double> widths{4, 5, 6, 8};
    double modulated_width = 4.0;
    double modulation = 0.6;
    int random_count = 8;
    std::uint64_t seed = 20240531;
    bool include_delta = false;           // grid delta (resolvent only)
};

std::vector<Probe> make_probes(const GridPtr& grid, const ProbeOptions& opt);

struct ProbeRatio {
    double abscissa;
    std::string probe;
    double ratio;
};

struct ProbeExperiment {
    std::vector<ProbeRatio> ratios;
    DecayFit fit; // slope of the max ratio over probes
    std::string warning;
};

struct ExponentTable;

// Fit of max_u |e^{itP(D)}u|_q / |u|_p against t; passes when the slope is
// within tolerance of (n/m)(1/q - 1/p).
ProbeExperiment dispersive_probe(const GridPtr& grid, const ExponentTable& table, double p,
                                 double q, const std::vector<double>& times,
                                 const std::vector<Probe>& probes, double tolerance);

// Same for the resolvent against Re lambda; Im lambda = imag_ratio * Re lambda.
ProbeExperiment resolvent_probe(const GridPtr& grid, const ExponentTable& table, double p,
                                double q, const std::vector<double>& re_lambda, double imag_ratio,
                                const std::vector<Probe>& probes, double tolerance);

// Upper-envelope check: slope of max |T(t)u|_p / |u|_p must be <= beta + slack.
ProbeExperiment growth_probe(const GridPtr& grid, double p, double beta,
                             const std::vector<double>& times, const std::vector<Probe>& probes,
                             double slack);

// int_0^inf e^{-lambda t} e^{itP(D)} f dt by Gauss-Legendre panels (truncated tail).
StateField laplace_of_group(const StateField& f, cplx lambda, double t_max, int panels,
                            int nodes_per_panel);
// lambda^beta int_0^inf e^{-lambda t} T(t) f dt
StateField laplace_of_integrated(const StateField& f, double lambda, double beta, double t_max,
                                 int panels, int nodes_per_panel);

} // namespace schrodlab
