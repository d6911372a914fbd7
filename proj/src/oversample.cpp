#include "s3ovs/oversample.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "s3ovs/csv.hpp"
#include "s3ovs/linalg.hpp"
#include "s3ovs/rng.hpp"

namespace s3ovs {

std::vector<int> knn_indices(const Matrix& pool, int query_index, int k) {
    const int n = static_cast<int>(pool.rows());
    if (k >= n) throw std::invalid_argument("knn_indices: k must be < pool size");
    if (k < 1) throw std::invalid_argument("knn_indices: k must be >= 1");

    const auto query = pool.row(static_cast<std::size_t>(query_index));
    std::vector<std::pair<double, int>> by_distance;
    by_distance.reserve(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
        if (i == query_index) continue;
        by_distance.emplace_back(dist_sq(pool.row(static_cast<std::size_t>(i)), query), i);
    }
    std::partial_sort(by_distance.begin(), by_distance.begin() + k, by_distance.end());

    std::vector<int> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = by_distance[static_cast<std::size_t>(i)].second;
    return out;
}

std::vector<double> convex_combine(std::span<const double> xi,
                                   std::span<const double> xh, double delta) {
    std::vector<double> out(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j)
        out[j] = xi[j] + delta * (xh[j] - xi[j]);
    return out;
}

double variance_factor(double delta) {
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("variance_factor: delta must lie in [0, 1]");
    return 1.0 - 2.0 * delta + 2.0 * delta * delta;
}

namespace {

struct Pool {
    std::vector<std::size_t> rows;  // rows of the source dataset
    int label = 0;                  // 0 for the class-independent pool
    int quota = 0;
};

void oversample_pool(const Dataset& dataset, const Pool& pool, int k, DeltaLaw law,
                     double fixed_delta, Rng& rng, SyntheticBatch& out) {
    const std::size_t pool_size = pool.rows.size();
    if (pool_size <= static_cast<std::size_t>(k))
        throw std::runtime_error("convex_oversample: pool of " +
                                 std::to_string(pool_size) +
                                 " patterns is too small for k=" + std::to_string(k));

    Matrix coords(0, dataset.dim());
    coords.reserve_rows(pool_size);
    for (std::size_t r : pool.rows) coords.append_row(dataset.features.row(r));

    // Neighbor lists once per pool. When k spans the whole pool the sorted
    // order is irrelevant (the draw is uniform over it), so skip the O(n^2)
    // distance pass entirely.
    const bool unrestricted = static_cast<std::size_t>(k) == pool_size - 1;
    std::vector<std::vector<int>> neighbors;
    if (!unrestricted) {
        neighbors.resize(pool_size);
        for (std::size_t i = 0; i < pool_size; ++i)
            neighbors[i] = knn_indices(coords, static_cast<int>(i), k);
    }

    for (int j = 0; j < pool.quota; ++j) {
        const std::size_t i_local = static_cast<std::size_t>(rng.uniform_int(pool_size));
        std::size_t h_local;
        if (unrestricted) {
            h_local = static_cast<std::size_t>(rng.uniform_int(pool_size - 1));
            if (h_local >= i_local) ++h_local;
        } else {
            const auto& nbrs = neighbors[i_local];
            h_local = static_cast<std::size_t>(nbrs[rng.uniform_int(nbrs.size())]);
        }
        const double delta = law == DeltaLaw::uniform ? rng.uniform() : fixed_delta;

        const std::size_t row_i = pool.rows[i_local];
        const std::size_t row_h = pool.rows[h_local];
        out.patterns.append_row(convex_combine(dataset.features.row(row_i),
                                               dataset.features.row(row_h), delta));
        out.seed_i_ids.push_back(dataset.ids[row_i]);
        out.seed_h_ids.push_back(dataset.ids[row_h]);
        out.deltas.push_back(delta);
        out.class_of_seeds.push_back(pool.label);
    }
}

}  // namespace

SyntheticBatch convex_oversample(const Dataset& dataset, const OversamplePlan& plan) {
    if (plan.m < 0) throw std::invalid_argument("convex_oversample: m must be >= 0");
    if (plan.k < 1) throw std::invalid_argument("convex_oversample: k must be >= 1");

    SyntheticBatch out;
    out.patterns = Matrix(0, dataset.dim());
    if (plan.m == 0) return out;
    out.patterns.reserve_rows(static_cast<std::size_t>(plan.m));

    std::vector<Pool> pools;
    if (plan.class_mode == ClassMode::class_independent) {
        Pool all;
        for (std::size_t i = 0; i < dataset.size(); ++i) all.rows.push_back(i);
        all.quota = plan.m;
        pools.push_back(std::move(all));
    } else {
        Pool pos, neg;
        pos.label = +1;
        neg.label = -1;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            if (dataset.supervision[i] != Supervision::labeled)
                throw std::runtime_error(
                    "convex_oversample: class_dependent mode needs labeled patterns");
            (dataset.labels[i] == +1 ? pos : neg).rows.push_back(i);
        }
        if (plan.quota_pos >= 0 || plan.quota_neg >= 0) {
            pos.quota = std::max(plan.quota_pos, 0);
            neg.quota = std::max(plan.quota_neg, 0);
            if (pos.quota + neg.quota != plan.m)
                throw std::invalid_argument("convex_oversample: quotas must sum to m");
        } else {
            pos.quota = round_half_up_to_int(
                plan.m * static_cast<double>(pos.rows.size()) /
                static_cast<double>(dataset.size()));
            neg.quota = plan.m - pos.quota;
        }
        if (pos.quota > 0) pools.push_back(std::move(pos));
        if (neg.quota > 0) pools.push_back(std::move(neg));
    }

    Rng rng(plan.seed);
    for (const Pool& pool : pools)
        oversample_pool(dataset, pool, plan.k, plan.delta_law, plan.fixed_delta, rng, out);
    return out;
}

ShrinkageReport shrinkage_report(const Dataset& original, const SyntheticBatch& batch) {
    if (original.size() == 0 || batch.patterns.rows() == 0)
        throw std::invalid_argument("shrinkage_report: empty input");
    if (original.dim() != batch.patterns.cols())
        throw std::invalid_argument("shrinkage_report: dimension mismatch");

    ShrinkageReport report;
    report.mean_original = column_means(original.features);
    report.mean_synthetic = column_means(batch.patterns);

    const Matrix cov_orig = covariance(original.features);
    const Matrix cov_synth = covariance(batch.patterns);
    const std::size_t d = original.dim();

    report.variance_factor_empirical.resize(d);
    for (std::size_t j = 0; j < d; ++j)
        report.variance_factor_empirical[j] =
            cov_orig(j, j) > 0.0 ? cov_synth(j, j) / cov_orig(j, j) : 0.0;

    const EigenDecomposition eig_orig = symmetric_eigen(cov_orig);
    const EigenDecomposition eig_synth = symmetric_eigen(cov_synth);
    report.eigvals_original = eig_orig.values;
    report.eigvals_synthetic = eig_synth.values;

    // Match each original eigenvector to the closest synthetic one (greedy,
    // by absolute inner product) and report angle plus eigenvalue ratio.
    std::vector<bool> used(d, false);
    report.eigval_ratios.resize(d);
    report.principal_angles_deg.resize(d);
    for (std::size_t a = 0; a < d; ++a) {
        double best = -1.0;
        std::size_t match = 0;
        for (std::size_t b = 0; b < d; ++b) {
            if (used[b]) continue;
            double inner = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                inner += eig_orig.vectors(i, a) * eig_synth.vectors(i, b);
            if (std::abs(inner) > best) {
                best = std::abs(inner);
                match = b;
            }
        }
        used[match] = true;
        report.eigval_ratios[a] = eig_orig.values[a] > 0.0
                                      ? eig_synth.values[match] / eig_orig.values[a]
                                      : 0.0;
        const double clamped = std::min(1.0, std::max(0.0, best));
        report.principal_angles_deg[a] = std::acos(clamped) * 180.0 / std::numbers::pi;
    }
    return report;
}

void write_batch_csv(const std::string& path, const SyntheticBatch& batch) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (std::size_t j = 0; j < batch.patterns.cols(); ++j) out << 'f' << (j + 1) << ',';
    out << "seed_i,seed_h,delta\n";
    for (std::size_t i = 0; i < batch.patterns.rows(); ++i) {
        for (double v : batch.patterns.row(i)) out << format_double(v) << ',';
        out << batch.seed_i_ids[i] << ',' << batch.seed_h_ids[i] << ','
            << format_double(batch.deltas[i]) << '\n';
    }
}

}  // namespace s3ovs
