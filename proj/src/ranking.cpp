#include "s3ovs/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "s3ovs/fdist.hpp"

namespace s3ovs {

RankTable mean_ranks(const std::vector<std::string>& datasets,
                     const std::vector<std::string>& methods, const Matrix& scores,
                     bool higher_is_better) {
    const std::size_t n = scores.rows();
    const std::size_t k = scores.cols();
    if (n < 2 || k < 2)
        throw std::invalid_argument("mean_ranks: need at least 2 datasets and 2 methods");
    if (datasets.size() != n || methods.size() != k)
        throw std::invalid_argument("mean_ranks: label count mismatch");

    RankTable table;
    table.datasets = datasets;
    table.methods = methods;
    table.scores = scores;
    table.ranks = Matrix(n, k);
    table.mean_ranks.assign(k, 0.0);

    std::vector<std::size_t> order(k);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t j = 0; j < k; ++j)
            if (!std::isfinite(scores(row, j)))
                throw std::invalid_argument("mean_ranks: non-finite score");
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return higher_is_better ? scores(row, a) > scores(row, b)
                                    : scores(row, a) < scores(row, b);
        });
        // Tied scores share the average of the ranks they span.
        std::size_t i = 0;
        while (i < k) {
            std::size_t j = i;
            while (j + 1 < k && scores(row, order[j + 1]) == scores(row, order[i])) ++j;
            const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t) table.ranks(row, order[t]) = shared;
            i = j + 1;
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        double sum = 0.0;
        for (std::size_t row = 0; row < n; ++row) sum += table.ranks(row, j);
        table.mean_ranks[j] = sum / static_cast<double>(n);
    }
    return table;
}

FriedmanResult friedman_test(const RankTable& table, double alpha) {
    const std::size_t n = table.ranks.rows();
    const std::size_t k = table.ranks.cols();
    if (n < 2 || k < 3)
        throw std::invalid_argument("friedman_test: need N >= 2 datasets and k >= 3 methods");

    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);

    double sum_sq = 0.0;
    for (double r : table.mean_ranks) sum_sq += r * r;

    FriedmanResult out;
    out.alpha = alpha;
    out.chi2 = 12.0 * nd / (kd * (kd + 1.0)) *
               (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
    out.df1 = static_cast<int>(k) - 1;
    out.df2 = (static_cast<int>(k) - 1) * (static_cast<int>(n) - 1);

    const double denom = nd * (kd - 1.0) - out.chi2;
    if (denom <= 0.0) {
        out.degenerate = true;
        out.f_value = std::numeric_limits<double>::infinity();
    } else {
        out.f_value = (nd - 1.0) * out.chi2 / denom;
    }
    out.critical_f = f_quantile(1.0 - alpha, out.df1, out.df2);
    out.reject = out.f_value > out.critical_f;
    return out;
}

}  // namespace s3ovs
