#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "s3ovs/linalg.hpp"
#include "s3ovs/oversample.hpp"
#include "s3ovs/rng.hpp"

using namespace s3ovs;

namespace {

Dataset gaussian_pool(int n, int d, std::uint64_t seed, double stddev = 1.0) {
    Dataset out;
    out.features = Matrix(0, static_cast<std::size_t>(d));
    Rng rng(seed);
    std::vector<double> row(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (double& v : row) v = rng.normal(0.0, stddev);
        out.append_pattern(row, i % 2 == 0 ? +1 : -1, i);
    }
    return out;
}

// Brute-force neighbor oracle: full sort by (distance, index), computed
// independently of knn_indices.
std::vector<int> knn_oracle(const Matrix& pool, int query, int k) {
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(pool.rows()); ++i)
        if (i != query) order.push_back(i);
    const auto q = pool.row(static_cast<std::size_t>(query));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double da = 0.0, db = 0.0;
        for (std::size_t j = 0; j < pool.cols(); ++j) {
            da += (pool(a, j) - q[j]) * (pool(a, j) - q[j]);
            db += (pool(b, j) - q[j]) * (pool(b, j) - q[j]);
        }
        if (da != db) return da < db;
        return a < b;
    });
    order.resize(static_cast<std::size_t>(k));
    return order;
}

double sample_variance(const std::vector<double>& values) {
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return sq / (values.size() - 1);
}

}  // namespace

TEST_CASE("knn_indices: ordered distances on a 1-D pool") {
    Matrix pool(0, 1);
    for (double v : {0.0, 1.0, 3.0, 10.0}) pool.append_row(std::vector<double>{v});
    CHECK(knn_indices(pool, 0, 2) == std::vector<int>{1, 2});
    CHECK(knn_indices(pool, 3, 1) == std::vector<int>{2});
}

TEST_CASE("knn_indices: duplicated query point is the nearest neighbor") {
    Matrix pool(0, 1);
    for (double v : {5.0, 2.0, 5.0, 9.0}) pool.append_row(std::vector<double>{v});
    const auto nbrs = knn_indices(pool, 0, 1);
    CHECK(nbrs == std::vector<int>{2});  // distance 0
}

TEST_CASE("knn_indices: matches the exhaustive sort oracle on random pools") {
    const Dataset data = gaussian_pool(50, 5, 21);
    for (int query : {0, 7, 23, 49})
        CHECK(knn_indices(data.features, query, 5) ==
              knn_oracle(data.features, query, 5));
}

TEST_CASE("knn_indices breaks exact distance ties by smaller index") {
    Matrix pool(0, 2);
    // Query at the origin with four points on the unit circle (all tied)
    // plus one nearer point.
    pool.append_row(std::vector<double>{0.0, 0.0});
    pool.append_row(std::vector<double>{1.0, 0.0});
    pool.append_row(std::vector<double>{0.0, 1.0});
    pool.append_row(std::vector<double>{-1.0, 0.0});
    pool.append_row(std::vector<double>{0.0, -1.0});
    pool.append_row(std::vector<double>{0.5, 0.0});
    CHECK(knn_indices(pool, 0, 3) == std::vector<int>{5, 1, 2});
    CHECK(knn_indices(pool, 0, 5) == std::vector<int>{5, 1, 2, 3, 4});
}

TEST_CASE("mean variance factor over uniform delta integrates to 2/3") {
    // Simpson quadrature of 1 - 2d + 2d^2 over [0, 1].
    const int intervals = 1000;
    const double h = 1.0 / intervals;
    double integral = variance_factor(0.0) + variance_factor(1.0);
    for (int i = 1; i < intervals; ++i)
        integral += variance_factor(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    integral *= h / 3.0;
    CHECK(integral == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("knn_indices rejects k >= pool size") {
    const Dataset data = gaussian_pool(4, 2, 1);
    CHECK_THROWS_AS(knn_indices(data.features, 0, 4), std::invalid_argument);
}

TEST_CASE("convex_combine arithmetic and endpoints") {
    const std::vector<double> xi{0.0, 0.0};
    const std::vector<double> xh{2.0, 2.0};
    CHECK(convex_combine(xi, xh, 0.25) == std::vector<double>{0.5, 0.5});
    CHECK(convex_combine(xi, xh, 0.0) == xi);
    CHECK(convex_combine(xi, xh, 1.0) == xh);
}

TEST_CASE("variance_factor endpoints and minimum") {
    CHECK(variance_factor(0.0) == 1.0);
    CHECK(variance_factor(0.5) == 0.5);
    CHECK(variance_factor(1.0) == 1.0);
    CHECK_THROWS_AS(variance_factor(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(variance_factor(1.1), std::invalid_argument);
}

TEST_CASE("batch invariants: segment, neighbor membership, class purity") {
    const Dataset data = gaussian_pool(40, 3, 33);
    OversamplePlan plan;
    plan.m = 200;
    plan.k = 4;
    plan.seed = 5;

    SUBCASE("class independent") {
        plan.class_mode = ClassMode::class_independent;
        const SyntheticBatch batch = convex_oversample(data, plan);
        REQUIRE(batch.patterns.rows() == 200);
        for (std::size_t j = 0; j < batch.patterns.rows(); ++j) {
            const std::size_t row_i = static_cast<std::size_t>(batch.seed_i_ids[j]);
            const std::size_t row_h = static_cast<std::size_t>(batch.seed_h_ids[j]);
            // Every coordinate lies between its two seeds.
            for (std::size_t c = 0; c < data.dim(); ++c) {
                const double lo = std::min(data.features(row_i, c), data.features(row_h, c));
                const double hi = std::max(data.features(row_i, c), data.features(row_h, c));
                CHECK(batch.patterns(j, c) >= lo - 1e-12);
                CHECK(batch.patterns(j, c) <= hi + 1e-12);
            }
            // Exact convex combination within float noise.
            const auto expect = convex_combine(data.features.row(row_i),
                                               data.features.row(row_h), batch.deltas[j]);
            for (std::size_t c = 0; c < data.dim(); ++c)
                CHECK(batch.patterns(j, c) == doctest::Approx(expect[c]).epsilon(1e-12));
            // seed_h is one of seed_i's k nearest neighbors.
            const auto nbrs = knn_indices(data.features, static_cast<int>(row_i), plan.k);
            CHECK(std::find(nbrs.begin(), nbrs.end(), static_cast<int>(row_h)) !=
                  nbrs.end());
            CHECK(batch.deltas[j] >= 0.0);
            CHECK(batch.deltas[j] <= 1.0);
        }
    }
    SUBCASE("class dependent keeps seed pairs inside one class") {
        plan.class_mode = ClassMode::class_dependent;
        const SyntheticBatch batch = convex_oversample(data, plan);
        for (std::size_t j = 0; j < batch.patterns.rows(); ++j) {
            const std::size_t row_i = static_cast<std::size_t>(batch.seed_i_ids[j]);
            const std::size_t row_h = static_cast<std::size_t>(batch.seed_h_ids[j]);
            CHECK(data.labels[row_i] == data.labels[row_h]);
            CHECK(batch.class_of_seeds[j] == data.labels[row_i]);
        }
    }
}

TEST_CASE("convex_oversample: explicit quotas and determinism") {
    const Dataset data = gaussian_pool(30, 2, 9);
    OversamplePlan plan;
    plan.m = 50;
    plan.k = 3;
    plan.class_mode = ClassMode::class_dependent;
    plan.quota_pos = 40;
    plan.quota_neg = 10;
    plan.seed = 17;
    const SyntheticBatch a = convex_oversample(data, plan);
    const SyntheticBatch b = convex_oversample(data, plan);
    CHECK(a.patterns == b.patterns);
    CHECK(a.deltas == b.deltas);
    CHECK(std::count(a.class_of_seeds.begin(), a.class_of_seeds.end(), +1) == 40);
    CHECK(std::count(a.class_of_seeds.begin(), a.class_of_seeds.end(), -1) == 10);

    plan.quota_pos = 10;  // quotas must sum to m
    CHECK_THROWS_AS(convex_oversample(data, plan), std::invalid_argument);
}

TEST_CASE("convex_oversample rejects pools not larger than k") {
    const Dataset data = gaussian_pool(6, 2, 9);  // 3 per class
    OversamplePlan plan;
    plan.m = 4;
    plan.k = 3;
    plan.class_mode = ClassMode::class_dependent;
    CHECK_THROWS_AS(convex_oversample(data, plan), std::runtime_error);
}

TEST_CASE("rotation equivariance: over-sampling commutes with rotations") {
    const Dataset data = gaussian_pool(60, 3, 71);
    OversamplePlan plan;
    plan.m = 200;
    plan.k = 5;
    plan.seed = 13;
    const SyntheticBatch base = convex_oversample(data, plan);

    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        // Random orthogonal 3x3 via Gram-Schmidt on a random matrix.
        double q[3][3];
        for (auto& row : q)
            for (double& v : row) v = rng.normal();
        for (int i = 0; i < 3; ++i) {
            for (int p = 0; p < i; ++p) {
                double proj = 0.0;
                for (int c = 0; c < 3; ++c) proj += q[i][c] * q[p][c];
                for (int c = 0; c < 3; ++c) q[i][c] -= proj * q[p][c];
            }
            double norm = 0.0;
            for (int c = 0; c < 3; ++c) norm += q[i][c] * q[i][c];
            norm = std::sqrt(norm);
            for (int c = 0; c < 3; ++c) q[i][c] /= norm;
        }

        Dataset rotated = data;
        for (std::size_t r = 0; r < data.size(); ++r)
            for (int i = 0; i < 3; ++i) {
                double sum = 0.0;
                for (int c = 0; c < 3; ++c) sum += q[i][c] * data.features(r, static_cast<std::size_t>(c));
                rotated.features(r, static_cast<std::size_t>(i)) = sum;
            }

        const SyntheticBatch rotated_batch = convex_oversample(rotated, plan);
        REQUIRE(rotated_batch.patterns.rows() == base.patterns.rows());
        for (std::size_t j = 0; j < base.patterns.rows(); ++j)
            for (int i = 0; i < 3; ++i) {
                double expected = 0.0;
                for (int c = 0; c < 3; ++c)
                    expected += q[i][c] * base.patterns(j, static_cast<std::size_t>(c));
                CHECK(std::abs(rotated_batch.patterns(j, static_cast<std::size_t>(i)) -
                               expected) < 1e-9);
            }
    }
}

TEST_CASE("variance law: unrestricted pairs shrink variance toward 2/3") {
    // Medium-size version of the acceptance run.
    const int n = 4000;
    Dataset pool = gaussian_pool(n, 1, 99);
    OversamplePlan plan;
    plan.m = 40000;
    plan.k = n - 1;
    plan.seed = 7;
    const SyntheticBatch batch = convex_oversample(pool, plan);
    std::vector<double> values(batch.patterns.data());
    const double ratio = sample_variance(values) /
                         sample_variance(pool.features.data());
    CHECK(ratio > 0.62);
    CHECK(ratio < 0.72);
}

TEST_CASE("shrinkage_report: identity case") {
    const Dataset data = gaussian_pool(200, 2, 55);
    SyntheticBatch copy;
    copy.patterns = data.features;
    const ShrinkageReport report = shrinkage_report(data, copy);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(report.eigval_ratios[j] == doctest::Approx(1.0));
        CHECK(report.principal_angles_deg[j] == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(report.variance_factor_empirical[j] == doctest::Approx(1.0));
    }
}

TEST_CASE("shrinkage_report: correlated Gaussian matches the 2/3 law") {
    // 2-D zero-mean Gaussian with covariance [[1, .8], [.8, 1]].
    const int n = 30000;
    Dataset data;
    data.features = Matrix(0, 2);
    Rng rng(2025);
    for (int i = 0; i < n; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double row[2] = {z1, 0.8 * z1 + std::sqrt(1.0 - 0.64) * z2};
        data.append_pattern(row, i % 2 == 0 ? +1 : -1, i);
    }
    OversamplePlan plan;
    plan.m = n;
    plan.k = n - 1;
    plan.seed = 3;
    const SyntheticBatch batch = convex_oversample(data, plan);
    const ShrinkageReport report = shrinkage_report(data, batch);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(report.eigval_ratios[j] > 0.63);
        CHECK(report.eigval_ratios[j] < 0.70);
        CHECK(report.principal_angles_deg[j] < 3.0);
        CHECK(std::abs(report.mean_synthetic[j] - report.mean_original[j]) < 0.02);
    }
    CHECK(report.eigvals_original[0] > report.eigvals_original[1]);
    CHECK(std::is_sorted(report.eigvals_synthetic.rbegin(),
                         report.eigvals_synthetic.rend()));
}

TEST_CASE("shrinkage_report: rank-deficient covariance reports zero eigenvalues") {
    Dataset data;
    data.features = Matrix(0, 2);
    for (int i = 0; i < 10; ++i) {
        const double row[2] = {static_cast<double>(i), 2.0 * i};  // collinear
        data.append_pattern(row, i % 2 == 0 ? +1 : -1, i);
    }
    OversamplePlan plan;
    plan.m = 20;
    plan.k = 3;
    plan.seed = 1;
    const SyntheticBatch batch = convex_oversample(data, plan);
    const ShrinkageReport report = shrinkage_report(data, batch);
    CHECK(report.eigvals_original[1] == 0.0);
    CHECK(report.eigvals_synthetic[1] == 0.0);
}
