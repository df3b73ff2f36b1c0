#pragma once

#include "schrodlab/symbol.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace schrodlab {

struct SurfacePoint {
    Point xi;            // P(xi) = 1
    Point normal;        // grad P / |grad P|
    double grad_phi = 0; // |grad phi| with phi = P^{1/m}
    Point direction;     // the sphere direction omega that produced xi
};

// xi = P(omega)^{-1/m} omega
SurfacePoint surface_point(const PolySymbol& P, const Point& omega);
std::vector<SurfacePoint> sample_surface(const PolySymbol& P, int density);

struct TypeResult {
    bool found = false;
    int k = 0;
    double delta = 0.0;
    std::vector<double> min_by_order; // refined minimum of the order-j sum, j = 1..m
    Point witness_xi;                 // minimizer for the last failing order
    Point witness_eta;
    int surface_density = 0;
    int direction_density = 0;
};

constexpr double kDefaultDeltaMin = 1e-6;

// Smallest k in [2, m] for which sum_{j<=k} |(eta.grad)^j (P-1)(xi)| stays above
// delta_min over xi on the surface and unit eta. density = 0 picks the default grid.
TypeResult detect_type(const PolySymbol& P, int density = 0, double delta_min = kDefaultDeltaMin);

struct ConvexResult {
    bool convex = false;
    double margin = 0.0;
    std::optional<std::pair<Point, Point>> witness; // (xi, zeta) violating the support inequality
    int density = 0;
};

constexpr double kConvexTolerance = 1e-9;

ConvexResult check_convex(const PolySymbol& P, int density = 2048);

// Gauss-Kronecker curvature of the level set through xi.
double gaussian_curvature(const PolySymbol& P, const Point& xi);

struct SupportPoints {
    SurfacePoint plus;  // maximizes <eta, xi>
    SurfacePoint minus; // minimizes <eta, xi>
    double normal_angle_error = 0.0;
    double support_identity_error = 0.0; // | <eta,xi+> |grad phi(xi+)| - 1 |
};

// Requires a convex surface; pass a precomputed verdict to skip the scan.
SupportPoints gauss_map_inverse(const PolySymbol& P, const Point& eta,
                                const ConvexResult* certified = nullptr);

struct SurfaceReport {
    int k = 0;
    double delta = 0.0;
    bool type_found = false;
    bool convex = false;
    double margin = 0.0;
    std::vector<Point> curvature_zeros;
    int density = 0;
    bool classical = false;
    double elliptic_min = 0.0;
};

constexpr double kCurvatureZero = 1e-8;

SurfaceReport analyze_surface(const PolySymbol& P, int density = 2048,
                              double delta_min = kDefaultDeltaMin);

} // namespace schrodlab
