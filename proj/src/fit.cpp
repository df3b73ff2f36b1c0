#include "schrodlab/fit.hpp"

#include "schrodlab/error.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace schrodlab {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionError("fit_line: size mismatch");
    if (x.size() < 2) throw PreconditionError("fit_line: need at least two points");
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = x[static_cast<size_t>(i)];
        b(i) = y[static_cast<size_t>(i)];
    }
    Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    Eigen::VectorXd res = b - A * c;
    LineFit f;
    f.intercept = c(0);
    f.slope = c(1);
    f.residual = std::sqrt(res.squaredNorm() / static_cast<double>(n));
    if (n > 2) {
        double s2 = res.squaredNorm() / static_cast<double>(n - 2);
        Eigen::Matrix2d cov = s2 * (A.transpose() * A).inverse();
        f.slope_stderr = std::sqrt(std::max(0.0, cov(1, 1)));
    }
    return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw PreconditionError("fit_loglog: non-positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

} // namespace schrodlab
