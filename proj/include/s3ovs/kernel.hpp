#pragma once

#include <span>
#include <string>
#include <vector>

#include "s3ovs/matrix.hpp"

namespace s3ovs {

enum class KernelKind { linear, rbf };

struct KernelSpec {
    KernelKind kind = KernelKind::linear;
    double gamma = 1.0;  // rbf only, > 0
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> z);

std::string kernel_to_string(const KernelSpec& spec);
KernelSpec kernel_from_string(const std::string& text);

// Row-cached Gram matrix over a fixed pattern matrix. Rows are computed on
// first use; up to 4000 patterns every row is kept, effectively caching the
// full matrix, so one instance can serve many retrains on the same patterns
// (the semi-supervised loop re-solves with changed labels only). Beyond that
// a bounded set of rows is cached with FIFO eviction.
class KernelMatrix {
public:
    KernelMatrix(const Matrix& x, const KernelSpec& spec);

    std::size_t size() const { return x_->rows(); }
    const Matrix& patterns() const { return *x_; }
    const KernelSpec& spec() const { return spec_; }

    std::span<const double> row(std::size_t i);
    double diag(std::size_t i) const { return diag_[i]; }

private:
    static constexpr std::size_t kFullCacheLimit = 4000;

    const Matrix* x_;
    KernelSpec spec_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::size_t> eviction_queue_;  // used only above the limit
    std::size_t cached_count_ = 0;
    std::vector<double> diag_;
};

}  // namespace s3ovs
