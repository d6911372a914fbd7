#include "s3ovs/fdist.hpp"

#include <cmath>
#include <stdexcept>

namespace s3ovs {

namespace {

// Continued fraction for I_x(a,b), modified Lentz iteration.
double beta_continued_fraction(double a, double b, double x) {
    const int max_iterations = 300;
    const double eps = 1e-15;
    const double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("regularized_incomplete_beta: no convergence");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("regularized_incomplete_beta: x must be in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // Use the continued fraction on whichever side converges fast.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw std::invalid_argument("f_cdf: degrees of freedom must be > 0");
    if (x <= 0.0) return 0.0;
    const double z = d1 * x / (d1 * x + d2);
    return regularized_incomplete_beta(0.5 * d1, 0.5 * d2, z);
}

double f_quantile(double p, double d1, double d2) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("f_quantile: p must lie in (0, 1)");
    double lo = 0.0;
    double hi = 1.0;
    while (f_cdf(hi, d1, d2) < p) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("f_quantile: bracket failed");
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (f_cdf(mid, d1, d2) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace s3ovs
