#pragma once

namespace s3ovs {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (modified Lentz), a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// CDF of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);

// Quantile of the F distribution: smallest x with F(x) >= p, found by
// bracketed bisection to 1e-9.
double f_quantile(double p, double d1, double d2);

}  // namespace s3ovs
