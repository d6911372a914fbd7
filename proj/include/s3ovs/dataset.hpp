#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s3ovs/matrix.hpp"

namespace s3ovs {

enum class Origin : std::uint8_t { real, synthetic };
enum class Supervision : std::uint8_t { labeled, unlabeled };

// Binary classification sample. Labels live in {-1, +1}; the label slot of
// an unlabeled pattern is masked to 0 so trainers can never read it.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::int64_t> ids;
    std::vector<Origin> origin;
    std::vector<Supervision> supervision;
    std::vector<std::string> feature_names;  // empty means f1..fd

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }

    void append_pattern(std::span<const double> values, int label, std::int64_t id,
                        Origin o = Origin::real, Supervision s = Supervision::labeled);

    Dataset subset(const std::vector<std::size_t>& rows) const;

    std::size_t count_label(int label) const;
    // Smaller class; ties resolve to -1.
    int minority_class() const;
    std::int64_t max_id() const;

    // Throws if any structural invariant is broken (finite features, masked
    // unlabeled slots, unique ids, parallel array sizes).
    void validate() const;
};

struct GeneratorSpec {
    int d = 2;
    int n = 100;
    double v = 0.25;
    std::uint64_t seed = 0;
};

// Balanced bi-modal Gaussian task: with s = d^(-1/4), class +1 has isotropic
// modes centered at 0 and 2s on every coordinate, class -1 at s and 3s;
// every coordinate has standard deviation v. Deterministic in the seed.
Dataset generate_gaussian_task(const GeneratorSpec& spec);

enum class McarMode { both_stratified, minority_only };

struct McarSplit {
    Dataset kept;
    Dataset removed;
};

// Removes round(ratio * class count) patterns per class (both_stratified)
// or from the minority class only. kept and removed partition the input.
McarSplit remove_mcar(const Dataset& dataset, double ratio, McarMode mode,
                      std::uint64_t seed);

struct SplitPlan {
    int k = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::vector<int> fold_of;  // per pattern, in [0, k)

    std::vector<std::size_t> fold_rows(int fold) const;
    std::vector<std::size_t> complement_rows(int fold) const;
};

SplitPlan stratified_kfold(const Dataset& dataset, int k, std::uint64_t seed,
                           int repeat = 0);

// Per-feature affine map fitted on a training set: x -> (x - mean) / std,
// population std convention, zero-variance features map to 0.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds;  // 0 marks a zero-variance feature

    void apply(Matrix& m) const;
};

Standardizer fit_standardizer(const Dataset& train);

struct StandardizeResult {
    Dataset train;
    std::vector<Dataset> others;
    Standardizer transform;
};

StandardizeResult standardize(const Dataset& train, const std::vector<Dataset>& others);

// Copy with every pattern's supervision set to unlabeled and label masked.
Dataset as_unlabeled(const Dataset& dataset);

// Concatenation; ids must stay unique across the result.
Dataset concat(const Dataset& a, const Dataset& b);

int round_half_up_to_int(double x);

}  // namespace s3ovs
