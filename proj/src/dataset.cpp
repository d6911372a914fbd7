#include "s3ovs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "s3ovs/rng.hpp"

namespace s3ovs {

int round_half_up_to_int(double x) {
    return static_cast<int>(std::floor(x + 0.5));
}

void Dataset::append_pattern(std::span<const double> values, int label,
                             std::int64_t id, Origin o, Supervision s) {
    features.append_row(values);
    labels.push_back(s == Supervision::unlabeled ? 0 : label);
    ids.push_back(id);
    origin.push_back(o);
    supervision.push_back(s);
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.features = Matrix(0, dim());
    out.feature_names = feature_names;
    out.features.reserve_rows(rows.size());
    for (std::size_t r : rows) {
        out.features.append_row(features.row(r));
        out.labels.push_back(labels[r]);
        out.ids.push_back(ids[r]);
        out.origin.push_back(origin[r]);
        out.supervision.push_back(supervision[r]);
    }
    return out;
}

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

int Dataset::minority_class() const {
    const std::size_t pos = count_label(+1);
    const std::size_t neg = count_label(-1);
    return pos < neg ? +1 : (neg < pos ? -1 : -1);
}

std::int64_t Dataset::max_id() const {
    std::int64_t m = -1;
    for (std::int64_t id : ids) m = std::max(m, id);
    return m;
}

void Dataset::validate() const {
    const std::size_t n = size();
    if (labels.size() != n || ids.size() != n || origin.size() != n ||
        supervision.size() != n)
        throw std::runtime_error("dataset: parallel arrays out of sync");
    for (std::size_t i = 0; i < n; ++i) {
        for (double v : features.row(i))
            if (!std::isfinite(v))
                throw std::runtime_error("dataset: non-finite feature value");
        if (supervision[i] == Supervision::labeled) {
            if (labels[i] != -1 && labels[i] != +1)
                throw std::runtime_error("dataset: labeled pattern without +-1 label");
        } else if (labels[i] != 0) {
            throw std::runtime_error("dataset: unlabeled pattern carries a label");
        }
    }
    std::unordered_set<std::int64_t> seen;
    for (std::int64_t id : ids)
        if (!seen.insert(id).second)
            throw std::runtime_error("dataset: duplicate pattern id");
}

Dataset generate_gaussian_task(const GeneratorSpec& spec) {
    if (spec.d < 1) throw std::invalid_argument("generator: d must be >= 1");
    if (spec.n < 2 || spec.n % 2 != 0)
        throw std::invalid_argument("generator: n must be even and >= 2");
    if (!(spec.v > 0)) throw std::invalid_argument("generator: v must be > 0");

    Rng rng(spec.seed);
    Dataset out;
    out.features = Matrix(0, static_cast<std::size_t>(spec.d));
    out.features.reserve_rows(static_cast<std::size_t>(spec.n));

    const int per_class = spec.n / 2;
    std::vector<double> row(static_cast<std::size_t>(spec.d));
    std::int64_t next_id = 0;
    // Class +1 modes center at 0 and 2s on every coordinate, class -1 at s
    // and 3s, so the classes interleave along the all-ones diagonal. The
    // per-coordinate spacing s = d^(-1/4) makes the inter-mode distance grow
    // as d^(1/4): slow enough that high-dimensional tasks stay noisy, fast
    // enough that they remain learnable, so the V overlap regimes behave
    // comparably across dimensionalities. At d = 1 the spacing is exactly 1.
    const double spacing = std::pow(static_cast<double>(spec.d), -0.25);
    const double mode_centers[2][2] = {{0.0, 2.0}, {1.0, 3.0}};
    for (int c = 0; c < 2; ++c) {
        const int label = c == 0 ? +1 : -1;
        const int first_mode = (per_class + 1) / 2;
        for (int i = 0; i < per_class; ++i) {
            const double center = mode_centers[c][i < first_mode ? 0 : 1] * spacing;
            for (int j = 0; j < spec.d; ++j)
                row[static_cast<std::size_t>(j)] = rng.normal(center, spec.v);
            out.append_pattern(row, label, next_id++);
        }
    }
    return out;
}

namespace {

std::vector<std::size_t> rows_with_label(const Dataset& d, int label) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d.labels[i] == label) rows.push_back(i);
    return rows;
}

}  // namespace

McarSplit remove_mcar(const Dataset& dataset, double ratio, McarMode mode,
                      std::uint64_t seed) {
    if (ratio < 0.0 || ratio >= 1.0)
        throw std::invalid_argument("remove_mcar: ratio must lie in [0, 1)");

    const int minority = dataset.minority_class();
    std::vector<std::size_t> removed_rows;
    Rng rng(seed);

    for (int label : {+1, -1}) {
        std::vector<std::size_t> rows = rows_with_label(dataset, label);
        // Shuffle once and remove a prefix: the removed set for a smaller
        // ratio is then a subset of the removed set for a larger one.
        rng.shuffle(rows);
        std::size_t remove_count = 0;
        if (mode == McarMode::both_stratified || label == minority)
            remove_count = static_cast<std::size_t>(
                round_half_up_to_int(ratio * static_cast<double>(rows.size())));

        const std::size_t keep = rows.size() - remove_count;
        const std::size_t min_keep = mode == McarMode::both_stratified ? 2 : 1;
        if (remove_count > 0 && keep < min_keep)
            throw std::runtime_error("remove_mcar: removal would empty class " +
                                     std::to_string(label));
        removed_rows.insert(removed_rows.end(), rows.begin(),
                            rows.begin() + static_cast<std::ptrdiff_t>(remove_count));
    }

    std::sort(removed_rows.begin(), removed_rows.end());
    std::vector<std::size_t> kept_rows;
    kept_rows.reserve(dataset.size() - removed_rows.size());
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (cursor < removed_rows.size() && removed_rows[cursor] == i)
            ++cursor;
        else
            kept_rows.push_back(i);
    }
    return {dataset.subset(kept_rows), dataset.subset(removed_rows)};
}

std::vector<std::size_t> SplitPlan::fold_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) rows.push_back(i);
    return rows;
}

std::vector<std::size_t> SplitPlan::complement_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != fold) rows.push_back(i);
    return rows;
}

SplitPlan stratified_kfold(const Dataset& dataset, int k, std::uint64_t seed,
                           int repeat) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
    SplitPlan plan;
    plan.k = k;
    plan.repeat = repeat;
    plan.seed = seed;
    plan.fold_of.assign(dataset.size(), -1);

    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(repeat)));
    for (int label : {+1, -1}) {
        std::vector<std::size_t> rows = rows_with_label(dataset, label);
        if (rows.size() < static_cast<std::size_t>(k))
            throw std::runtime_error("stratified_kfold: class " + std::to_string(label) +
                                     " has fewer patterns than folds");
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            plan.fold_of[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return plan;
}

void Standardizer::apply(Matrix& m) const {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j)
            row[j] = stds[j] > 0.0 ? (row[j] - means[j]) / stds[j] : 0.0;
    }
}

Standardizer fit_standardizer(const Dataset& train) {
    if (train.size() == 0)
        throw std::invalid_argument("standardize: empty training set");
    Standardizer s;
    s.means.assign(train.dim(), 0.0);
    s.stds.assign(train.dim(), 0.0);
    const double n = static_cast<double>(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto row = train.features.row(i);
        for (std::size_t j = 0; j < train.dim(); ++j) s.means[j] += row[j];
    }
    for (double& m : s.means) m /= n;
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto row = train.features.row(i);
        for (std::size_t j = 0; j < train.dim(); ++j) {
            const double d = row[j] - s.means[j];
            s.stds[j] += d * d;
        }
    }
    for (double& v : s.stds) v = std::sqrt(v / n);
    return s;
}

StandardizeResult standardize(const Dataset& train, const std::vector<Dataset>& others) {
    StandardizeResult out;
    out.transform = fit_standardizer(train);
    out.train = train;
    out.transform.apply(out.train.features);
    out.others.reserve(others.size());
    for (const Dataset& d : others) {
        Dataset copy = d;
        out.transform.apply(copy.features);
        out.others.push_back(std::move(copy));
    }
    return out;
}

Dataset as_unlabeled(const Dataset& dataset) {
    Dataset out = dataset;
    std::fill(out.labels.begin(), out.labels.end(), 0);
    std::fill(out.supervision.begin(), out.supervision.end(), Supervision::unlabeled);
    return out;
}

Dataset concat(const Dataset& a, const Dataset& b) {
    if (a.size() == 0) return b;
    if (b.size() == 0) return a;
    if (a.dim() != b.dim())
        throw std::invalid_argument("concat: dimension mismatch");
    Dataset out = a;
    for (std::size_t i = 0; i < b.size(); ++i) {
        out.features.append_row(b.features.row(i));
        out.labels.push_back(b.labels[i]);
        out.ids.push_back(b.ids[i]);
        out.origin.push_back(b.origin[i]);
        out.supervision.push_back(b.supervision[i]);
    }
    return out;
}

}  // namespace s3ovs
