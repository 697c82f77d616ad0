#pragma once

#include <span>

namespace wbomd {

/// Least-squares line fit result with the coefficient of determination.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares on the raw (x, y) pairs.  Needs at least 2 points.
SlopeFit fit_linear(std::span<const double> x, std::span<const double> y);

/// Least squares on (log x, log y); the slope is the empirical power-law
/// order.  All inputs must be strictly positive.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

/// Upper-tail p-value of a chi-squared statistic with the given degrees of
/// freedom: P(X >= statistic).
double chi_squared_pvalue(double statistic, int dof);

} // namespace wbomd
