#pragma once

#include "schrodlab/spectral.hpp"
#include "schrodlab/symbol.hpp"

#include <cmath>

namespace testing {

using namespace schrodlab;

inline PolySymbol circle4() { return PolySymbol(2, 4, {{{4, 0}, 1}, {{2, 2}, 2}, {{0, 4}, 1}}); }
inline PolySymbol quartic_axes() { return PolySymbol(2, 4, {{{4, 0}, 1}, {{0, 4}, 1}}); }
inline PolySymbol sextic() { return PolySymbol(2, 6, {{{6, 0}, 1}, {{2, 4}, 5}, {{0, 6}, 1}}); }
inline PolySymbol nonconvex() { return PolySymbol(2, 4, {{{4, 0}, 1}, {{2, 2}, -1}, {{0, 4}, 1}}); }

inline StateField gaussian(const GridPtr& g, double sigma, double k0 = 0.0) {
    return StateField::from_function(g, [=](const Point& x) {
        double r2 = 0;
        for (double v : x) r2 += v * v;
        return std::exp(cplx(-r2 / (2 * sigma * sigma), k0 * x[0]));
    });
}

inline GridPtr grid(const PolySymbol& P, int N, double L) { return std::make_shared<const SpectralGrid>(P, N, L); }

} // namespace testing
