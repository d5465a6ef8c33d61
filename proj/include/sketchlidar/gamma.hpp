#pragma once

namespace sketchlidar {

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Inverse of Q in x: returns x with Q(a, x) = q, to ~1e-12 relative.
double inverse_gamma_q(double a, double q);

/// P(X <= x) for X ~ chi-squared with dof degrees of freedom.
double chi2_cdf(double x, double dof);

/// z with P(N(0,1) > z) = beta.
double normal_upper_quantile(double beta);

}  // namespace sketchlidar
