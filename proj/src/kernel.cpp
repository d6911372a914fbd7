#include "s3ovs/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace s3ovs {

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> z) {
    if (x.size() != z.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    switch (spec.kind) {
        case KernelKind::linear:
            return dot(x, z);
        case KernelKind::rbf:
            if (!(spec.gamma > 0.0))
                throw std::invalid_argument("kernel_eval: rbf gamma must be > 0");
            return std::exp(-spec.gamma * dist_sq(x, z));
    }
    throw std::logic_error("kernel_eval: unknown kernel kind");
}

std::string kernel_to_string(const KernelSpec& spec) {
    if (spec.kind == KernelKind::linear) return "linear";
    std::ostringstream os;
    os << "rbf " << spec.gamma;
    return os.str();
}

KernelSpec kernel_from_string(const std::string& text) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    KernelSpec spec;
    if (kind == "linear") {
        spec.kind = KernelKind::linear;
    } else if (kind == "rbf") {
        spec.kind = KernelKind::rbf;
        if (!(is >> spec.gamma) || !(spec.gamma > 0.0))
            throw std::runtime_error("kernel_from_string: bad rbf gamma");
    } else {
        throw std::runtime_error("kernel_from_string: unknown kernel '" + kind + "'");
    }
    return spec;
}

KernelMatrix::KernelMatrix(const Matrix& x, const KernelSpec& spec)
    : x_(&x), spec_(spec), rows_(x.rows()), diag_(x.rows()) {
    for (std::size_t i = 0; i < x.rows(); ++i)
        diag_[i] = kernel_eval(spec_, x.row(i), x.row(i));
}

std::span<const double> KernelMatrix::row(std::size_t i) {
    auto& cached = rows_[i];
    const std::size_t n = x_->rows();
    if (n > kFullCacheLimit) {
        // Least-recently-used bookkeeping. Touching on every access keeps a
        // row alive while the solver still holds a span into it (the solver
        // works with at most two rows at a time and the cap is >= 2).
        const auto it = std::find(eviction_queue_.begin(), eviction_queue_.end(), i);
        if (it != eviction_queue_.end()) eviction_queue_.erase(it);
        eviction_queue_.push_back(i);
        if (cached.empty()) {
            const std::size_t max_rows = kFullCacheLimit * kFullCacheLimit / n + 2;
            while (cached_count_ >= max_rows && eviction_queue_.size() > 1) {
                const std::size_t victim = eviction_queue_.front();
                eviction_queue_.erase(eviction_queue_.begin());
                rows_[victim].clear();
                rows_[victim].shrink_to_fit();
                --cached_count_;
            }
        }
    }
    if (cached.empty()) {
        ++cached_count_;
        cached.resize(n);
        const auto xi = x_->row(i);
        for (std::size_t j = 0; j < n; ++j)
            cached[j] = kernel_eval(spec_, xi, x_->row(j));
    }
    return cached;
}

}  // namespace s3ovs
