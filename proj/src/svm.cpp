#include "s3ovs/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s3ovs/rng.hpp"

namespace s3ovs {

double hinge_loss(int y, double o) {
    if (y != -1 && y != +1)
        throw std::invalid_argument("hinge_loss: label must be -1 or +1");
    return std::max(0.0, 1.0 - y * o);
}

double decision_value(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.support_vectors.cols())
        throw std::invalid_argument("decision_value: dimension mismatch");
    double sum = model.bias;
    for (std::size_t i = 0; i < model.support_count(); ++i)
        sum += model.dual_coefs[i] * kernel_eval(model.kernel, model.support_vectors.row(i), x);
    return sum;
}

int predict_one(const SvmModel& model, std::span<const double> x) {
    return decision_value(model, x) >= 0.0 ? +1 : -1;
}

std::vector<int> predict(const SvmModel& model, const Matrix& x) {
    std::vector<int> labels(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) labels[i] = predict_one(model, x.row(i));
    return labels;
}

double w_norm_sq(const SvmModel& model) {
    double sum = 0.0;
    for (std::size_t i = 0; i < model.support_count(); ++i)
        for (std::size_t j = 0; j < model.support_count(); ++j)
            sum += model.dual_coefs[i] * model.dual_coefs[j] *
                   kernel_eval(model.kernel, model.support_vectors.row(i),
                               model.support_vectors.row(j));
    return sum;
}

namespace {

// Platt-style SMO over the dual with per-pattern box bounds.
class SmoSolver {
public:
    SmoSolver(KernelMatrix& kernel, const std::vector<int>& y,
              const std::vector<double>& costs, const SvmTrainOptions& options)
        : kernel_(kernel), y_(y), costs_(costs), opts_(options), rng_(options.seed) {
        n_ = y.size();
        alpha_.assign(n_, 0.0);
        errors_.assign(n_, 0.0);
    }

    void warm_start(const std::vector<double>& alpha, double bias) {
        alpha_ = alpha;
        double balance = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            alpha_[i] = std::clamp(alpha_[i], 0.0, costs_[i]);
            balance += alpha_[i] * y_[i];
        }
        // Pair updates preserve sum(alpha_i y_i) exactly as initialized, so
        // an unbalanced start would converge to the wrong problem. Restart
        // cold instead.
        if (std::abs(balance) > 1e-9) {
            std::fill(alpha_.begin(), alpha_.end(), 0.0);
            bias = 0.0;
        }
        bias_ = bias;
    }

    SvmTrainResult solve() {
        // E_i = f(x_i) - y_i; a cold start (alpha = 0, b = 0) gives -y_i.
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
        for (std::size_t j = 0; j < n_; ++j) {
            if (alpha_[j] <= 0.0) continue;
            const auto kj = kernel_.row(j);
            const double coef = alpha_[j] * y_[j];
            for (std::size_t i = 0; i < n_; ++i) errors_[i] += coef * kj[i];
        }
        if (bias_ != 0.0)
            for (std::size_t i = 0; i < n_; ++i) errors_[i] += bias_;

        SvmTrainResult result;
        bool examine_all = true;
        int passes = 0;
        std::size_t changed = 0;
        while ((changed > 0 || examine_all) && passes < opts_.max_passes) {
            changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (!examine_all && (alpha_[i] <= 0.0 || alpha_[i] >= costs_[i]))
                    continue;
                changed += examine(i);
            }
            ++passes;
            result.objective_trace.push_back(dual_objective());
            if (examine_all)
                examine_all = false;
            else if (changed == 0)
                examine_all = true;
        }
        result.converged = changed == 0 && !examine_all;
        result.passes = passes;
        finalize(result);
        return result;
    }

private:
    double dual_objective() const {
        // W(alpha) = sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij; the
        // quadratic term folds out of the error cache because
        // f_i = E_i + y_i and sum(alpha_i y_i) = 0.
        double linear = 0.0, quad = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            linear += alpha_[i];
            quad += alpha_[i] * y_[i] * (errors_[i] + y_[i] - bias_);
        }
        return linear - 0.5 * quad;
    }

    std::size_t examine(std::size_t i2) {
        const double e2 = errors_[i2];
        const double r2 = e2 * y_[i2];
        const bool violates = (r2 < -opts_.tol && alpha_[i2] < costs_[i2]) ||
                              (r2 > opts_.tol && alpha_[i2] > 0.0);
        if (!violates) return 0;

        // First: the partner with the largest |E1 - E2| among unbound alphas.
        std::size_t best = i2;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] <= 0.0 || alpha_[i] >= costs_[i]) continue;
            const double gap = std::abs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best != i2 && take_step(best, i2)) return 1;

        // Then every unbound alpha from a random start, then everything.
        const std::size_t start1 = rng_.uniform_int(n_);
        for (std::size_t offset = 0; offset < n_; ++offset) {
            const std::size_t i1 = (start1 + offset) % n_;
            if (alpha_[i1] <= 0.0 || alpha_[i1] >= costs_[i1]) continue;
            if (take_step(i1, i2)) return 1;
        }
        const std::size_t start2 = rng_.uniform_int(n_);
        for (std::size_t offset = 0; offset < n_; ++offset) {
            const std::size_t i1 = (start2 + offset) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = errors_[i1], e2 = errors_[i2];
        const double s = y1 * y2;
        const double c1 = costs_[i1], c2 = costs_[i2];

        double low, high;
        if (y1 != y2) {
            low = std::max(0.0, a2 - a1);
            high = std::min(c2, c1 + a2 - a1);
        } else {
            low = std::max(0.0, a1 + a2 - c1);
            high = std::min(c2, a1 + a2);
        }
        if (high - low < 1e-12) return false;

        const auto k1 = kernel_.row(i1);
        const auto k2 = kernel_.row(i2);
        const double k11 = kernel_.diag(i1), k22 = kernel_.diag(i2), k12 = k1[i2];
        const double eta = 2.0 * k12 - k11 - k22;

        double a2_new;
        if (eta < 0.0) {
            a2_new = std::clamp(a2 - y2 * (e1 - e2) / eta, low, high);
        } else {
            // Flat direction (duplicates or degenerate kernel): evaluate the
            // dual objective at both ends of the feasible segment. g_j is
            // y_j times the decision contribution of all other alphas.
            const double g1 = y1 * (e1 - bias_) + 1.0 - a1 * k11 - s * a2 * k12;
            const double g2 = y2 * (e2 - bias_) + 1.0 - s * a1 * k12 - a2 * k22;
            const double l1 = a1 + s * (a2 - low);
            const double h1 = a1 + s * (a2 - high);
            const double obj_low = 0.5 * (l1 * l1 * k11 + low * low * k22) +
                                   s * k12 * l1 * low + g1 * l1 + g2 * low - l1 - low;
            const double obj_high = 0.5 * (h1 * h1 * k11 + high * high * k22) +
                                    s * k12 * h1 * high + g1 * h1 + g2 * high - h1 - high;
            if (obj_low < obj_high - 1e-12)
                a2_new = low;
            else if (obj_high < obj_low - 1e-12)
                a2_new = high;
            else
                return false;
        }
        if (a2_new < 1e-10 * c2) a2_new = 0.0;
        else if (a2_new > c2 * (1.0 - 1e-10)) a2_new = c2;
        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;

        double a1_new = a1 + s * (a2 - a2_new);
        if (a1_new < 1e-10 * c1) a1_new = 0.0;
        else if (a1_new > c1 * (1.0 - 1e-10)) a1_new = c1;

        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);
        const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        const bool in1 = a1_new > 0.0 && a1_new < c1;
        const bool in2 = a2_new > 0.0 && a2_new < c2;
        if (in1)
            b_new = b1;
        else if (in2)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);

        const double db = b_new - bias_;
        for (std::size_t i = 0; i < n_; ++i)
            errors_[i] += d1 * k1[i] + d2 * k2[i] + db;

        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        bias_ = b_new;
        return true;
    }

    void finalize(SvmTrainResult& result) {
        result.alpha = alpha_;
        result.decision_values.resize(n_);
        for (std::size_t i = 0; i < n_; ++i)
            result.decision_values[i] = errors_[i] + y_[i];
        result.dual_objective = dual_objective();

        SvmModel& model = result.model;
        model.kernel = kernel_.spec();
        model.bias = bias_;
        model.converged = result.converged;
        model.support_vectors = Matrix(0, kernel_.patterns().cols());
        double wsq = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            wsq += alpha_[i] * y_[i] * (result.decision_values[i] - bias_);
            if (alpha_[i] <= 0.0) continue;
            model.support_vectors.append_row(kernel_.patterns().row(i));
            model.dual_coefs.push_back(alpha_[i] * y_[i]);
            model.sv_costs.push_back(costs_[i]);
        }
        result.w_norm_sq = wsq;
    }

    KernelMatrix& kernel_;
    const std::vector<int>& y_;
    const std::vector<double>& costs_;
    SvmTrainOptions opts_;
    Rng rng_;
    std::size_t n_ = 0;
    std::vector<double> alpha_;
    std::vector<double> errors_;
    double bias_ = 0.0;
};

void check_training_inputs(std::size_t n, const std::vector<int>& y,
                           const std::vector<double>& costs) {
    if (n == 0) throw std::invalid_argument("train_svm: empty training set");
    if (y.size() != n || costs.size() != n)
        throw std::invalid_argument("train_svm: y/costs size mismatch");
    bool has_pos = false, has_neg = false;
    for (int label : y) {
        if (label == +1) has_pos = true;
        else if (label == -1) has_neg = true;
        else throw std::invalid_argument("train_svm: labels must be -1 or +1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("train_svm: need at least one pattern per class");
    for (double c : costs)
        if (!(c > 0.0)) throw std::invalid_argument("train_svm: costs must be > 0");
}

}  // namespace

SvmTrainResult train_svm_cached(KernelMatrix& kernel, const std::vector<int>& y,
                                const std::vector<double>& costs,
                                const SvmTrainOptions& options,
                                const std::vector<double>* warm_alpha,
                                double warm_bias) {
    check_training_inputs(kernel.size(), y, costs);
    SmoSolver solver(kernel, y, costs, options);
    if (warm_alpha != nullptr) solver.warm_start(*warm_alpha, warm_bias);
    return solver.solve();
}

SvmTrainResult train_svm(const Matrix& x, const std::vector<int>& y,
                         const std::vector<double>& costs, const KernelSpec& kernel,
                         const SvmTrainOptions& options) {
    KernelMatrix cache(x, kernel);
    return train_svm_cached(cache, y, costs, options);
}

}  // namespace s3ovs
