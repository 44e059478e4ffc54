#pragma once

#include <vector>

namespace rdfront {

struct LinearFit {
    std::vector<double> coef;
    double rms_residual = 0;
};

/// Least squares for sum_k coef[k] * columns[k][i] = rhs[i].
LinearFit least_squares(const std::vector<std::vector<double>>& columns, const std::vector<double>& rhs);

/// Polynomial least squares in x with the given powers.
LinearFit fit_powers(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& powers);

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double stderr_slope = 0;
    int points = 0;
};

/// Straight-line fit of log|y| against log x. Throws ConfigError with fewer
/// than min_points points.
SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y, int min_points = 2);

struct PowerLawFit {
    double power = 0;          ///< fitted exponent of the leading column
    std::vector<double> coef;  ///< leading coefficient, then one per fixed power
    double rms_residual = 0;
};

/// y = c0 x^power + sum_k c_k x^fixed[k], with power searched on [lo, hi]
/// (golden section on the linear least-squares residual).
PowerLawFit fit_free_power(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& fixed, double lo, double hi);

}  // namespace rdfront
