#pragma once

#include <vector>

namespace schrodlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // rms of fit residuals
    double slope_stderr = 0.0;
};

// Least squares y = intercept + slope * x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fit of log(y) against log(x).
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct DecayFit {
    std::vector<double> abscissa; // t, r or Re lambda
    std::vector<double> values;   // enveloped quantity
    double slope = 0.0;
    double predicted = 0.0;
    double residual = 0.0;
    double band = 0.0; // 2 sigma on the slope
    double slack = 0.0;
    bool pass = false;
};

} // namespace schrodlab
