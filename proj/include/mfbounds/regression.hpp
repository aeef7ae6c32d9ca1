#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "mfbounds/error.hpp"

namespace mfbounds {

struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t npoints = 0;
};

// Unweighted least squares of y on x, slope in the raw-sums form
//   (sum xy - sum x sum y / N) / (sum x^2 - (sum x)^2 / N).
inline RegressionFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw RegressionError("x and y differ in length");
    const std::size_t n = x.size();
    if (n < 3) throw RegressionError("regression needs at least 3 scales, got " + std::to_string(n));
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    const double den = sxx - sx * sx / nn;
    if (!(den > 1e-12 * std::max(1.0, sxx))) throw RegressionError("degenerate scale grid: all log-scales coincide");
    RegressionFit fit;
    fit.npoints = n;
    fit.slope = (sxy - sx * sy / nn) / den;
    fit.intercept = (sy - fit.slope * sx) / nn;

    const double ybar = sy / nn;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    // A flat column (tau = 0) fits perfectly when its residuals vanish.
    fit.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : (ss_res <= 1e-24 ? 1.0 : 0.0);
    return fit;
}

}  // namespace mfbounds
