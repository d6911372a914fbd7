#include "s3ovs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace s3ovs {

std::vector<double> column_means(const Matrix& m) {
    std::vector<double> means(m.cols(), 0.0);
    if (m.rows() == 0) return means;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) means[j] += row[j];
    }
    for (double& v : means) v /= static_cast<double>(m.rows());
    return means;
}

Matrix covariance(const Matrix& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    Matrix cov(d, d);
    if (n < 2) return cov;
    const std::vector<double> mu = column_means(m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        for (std::size_t a = 0; a < d; ++a) {
            const double da = row[a] - mu[a];
            for (std::size_t b = a; b < d; ++b) {
                cov(a, b) += da * (row[b] - mu[b]);
            }
        }
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= denom;
            cov(b, a) = cov(a, b);
        }
    return cov;
}

EigenDecomposition symmetric_eigen(const Matrix& symmetric) {
    const std::size_t n = symmetric.rows();
    if (n != symmetric.cols())
        throw std::invalid_argument("symmetric_eigen: matrix must be square");

    Matrix a = symmetric;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-300) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    double max_abs = 0.0;
    for (std::size_t j = 0; j < n; ++j) max_abs = std::max(max_abs, std::abs(a(j, j)));
    const double clamp = 1e-12 * max_abs;
    for (std::size_t j = 0; j < n; ++j) {
        double lambda = a(order[j], order[j]);
        if (std::abs(lambda) <= clamp) lambda = 0.0;
        out.values[j] = lambda;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

}  // namespace s3ovs
