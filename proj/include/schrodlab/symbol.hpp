#pragma once

#include <map>
#include <string>
#include <vector>

namespace schrodlab {

using Point = std::vector<double>;
using MultiIndex = std::vector<int>;

struct Term {
    MultiIndex alpha;
    double c = 0.0;
};

// Sum of c * x^alpha with every |alpha| equal to degree().
// Terms are kept in graded lexicographic order with duplicates merged.
class HomogeneousPolynomial {
public:
    HomogeneousPolynomial() = default;
    HomogeneousPolynomial(int n, int degree, std::vector<Term> terms);

    int n() const { return n_; }
    int degree() const { return degree_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    double eval(const Point& x) const;
    HomogeneousPolynomial derivative(const MultiIndex& alpha) const;

private:
    int n_ = 0;
    int degree_ = 0;
    std::vector<Term> terms_;
};

// All multi-indices of length n and total degree d, graded-lex descending.
std::vector<MultiIndex> multi_indices(int n, int d);

class PolySymbol {
public:
    PolySymbol(int n, int m, std::vector<Term> terms);

    int n() const { return n_; }
    int m() const { return m_; }
    const std::vector<Term>& terms() const { return p_.terms(); }
    const HomogeneousPolynomial& polynomial() const { return p_; }
    // m == 2 is accepted but outside the higher-order regime.
    bool classical() const { return m_ == 2; }

    double eval(const Point& xi) const;
    Point gradient(const Point& xi) const;
    std::vector<Point> hessian(const Point& xi) const;
    // d^alpha P, |alpha| <= m; zero polynomial past the degree.
    const HomogeneousPolynomial& derivative(const MultiIndex& alpha) const;
    // (eta . grad)^j P at xi. eta must be a unit vector.
    double directional_derivative(const Point& xi, const Point& eta, int j) const;
    // phi = P^{1/m}
    double phi(const Point& xi) const;

    PolySymbol negated() const;
    PolySymbol scaled(double s) const;

    std::string describe() const;

private:
    void check_dim(const Point& xi) const;

    int n_;
    int m_;
    HomogeneousPolynomial p_;
    std::map<MultiIndex, HomogeneousPolynomial> table_;
    std::vector<std::vector<std::pair<MultiIndex, double>>> contraction_; // j!/alpha! per order
    HomogeneousPolynomial zero_;
};

// Directions on the unit sphere S^{n-1}: equispaced angles for n=2,
// Fibonacci lattice for n=3, product of angles for n>=4.
std::vector<Point> sphere_samples(int n, int density);

struct EllipticReport {
    bool elliptic = false;
    double min_value = 0.0;
    Point argmin;
    int density = 0;
};

constexpr int kDefaultSphereDensity = 4096;

EllipticReport check_elliptic(const PolySymbol& P, int density = kDefaultSphereDensity);

// Returns P, or -P when P is negative on the sphere. *flipped reports which.
PolySymbol normalize_sign(const PolySymbol& P, bool* flipped = nullptr);

double norm2(const Point& x);
double dot(const Point& a, const Point& b);

} // namespace schrodlab
