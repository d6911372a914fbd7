#pragma once

#include <cstdint>
#include <vector>

#include "s3ovs/dataset.hpp"
#include "s3ovs/matrix.hpp"

namespace s3ovs {

enum class ClassMode { class_dependent, class_independent };
enum class DeltaLaw { uniform, fixed };

struct OversamplePlan {
    int m = 0;
    int k = 5;
    ClassMode class_mode = ClassMode::class_independent;
    DeltaLaw delta_law = DeltaLaw::uniform;
    double fixed_delta = 0.5;
    std::uint64_t seed = 0;
    // Per-class counts when class_dependent; -1 splits m in proportion to
    // the class pool sizes.
    int quota_pos = -1;
    int quota_neg = -1;
};

// Indices of the k nearest neighbors of pool[query_index] by Euclidean
// distance, query excluded, ties broken by smaller index.
std::vector<int> knn_indices(const Matrix& pool, int query_index, int k);

struct SyntheticBatch {
    Matrix patterns;
    std::vector<std::int64_t> seed_i_ids;
    std::vector<std::int64_t> seed_h_ids;
    std::vector<double> deltas;
    std::vector<int> class_of_seeds;  // +-1 under class_dependent, 0 otherwise
};

// x* = x_i + delta * (x_h - x_i)
std::vector<double> convex_combine(std::span<const double> xi,
                                   std::span<const double> xh, double delta);

// Draws m seed pairs (first seed uniform over its pool, second uniform over
// the first seed's k nearest neighbors) and emits their convex combinations.
// Deterministic in plan.seed.
SyntheticBatch convex_oversample(const Dataset& dataset, const OversamplePlan& plan);

// 1 - 2*delta + 2*delta^2: the factor by which one convex combination of two
// same-distribution Gaussian seeds scales the variance.
double variance_factor(double delta);

struct ShrinkageReport {
    std::vector<double> variance_factor_empirical;  // per coordinate Var[X*]/Var[X]
    std::vector<double> eigvals_original;           // descending
    std::vector<double> eigvals_synthetic;          // descending
    std::vector<double> eigval_ratios;              // synthetic over matched original
    std::vector<double> principal_angles_deg;       // between matched eigenvectors
    std::vector<double> mean_original;
    std::vector<double> mean_synthetic;
};

ShrinkageReport shrinkage_report(const Dataset& original, const SyntheticBatch& batch);

void write_batch_csv(const std::string& path, const SyntheticBatch& batch);

}  // namespace s3ovs
