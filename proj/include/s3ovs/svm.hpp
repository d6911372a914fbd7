#pragma once

#include <cstdint>
#include <vector>

#include "s3ovs/kernel.hpp"
#include "s3ovs/matrix.hpp"

namespace s3ovs {

double hinge_loss(int y, double o);

struct SvmModel {
    Matrix support_vectors;
    std::vector<double> dual_coefs;  // alpha_i * y_i per support vector
    std::vector<double> sv_costs;    // cost bound the pattern was trained with
    double bias = 0.0;
    KernelSpec kernel;
    bool converged = true;

    std::size_t support_count() const { return dual_coefs.size(); }
};

double decision_value(const SvmModel& model, std::span<const double> x);
int predict_one(const SvmModel& model, std::span<const double> x);  // sign(0) -> +1
std::vector<int> predict(const SvmModel& model, const Matrix& x);

// ||w||^2 computed from the dual coefficients.
double w_norm_sq(const SvmModel& model);

struct SvmTrainOptions {
    double tol = 1e-3;       // KKT tolerance
    int max_passes = 4000;   // outer sweeps before giving up
    std::uint64_t seed = 0x5eedULL;  // drives the fallback working-set scans
};

struct SvmTrainResult {
    SvmModel model;
    std::vector<double> alpha;            // per training pattern
    std::vector<double> decision_values;  // f(x_i) on the training patterns
    std::vector<double> objective_trace;  // dual objective after each sweep
    double dual_objective = 0.0;
    double w_norm_sq = 0.0;
    int passes = 0;
    bool converged = true;
};

// Soft-margin SVM by sequential minimal optimization with a per-pattern box
// constraint 0 <= alpha_i <= costs[i]. Requires at least one pattern of each
// class. On hitting max_passes the best iterate is returned with
// converged=false rather than throwing.
SvmTrainResult train_svm(const Matrix& x, const std::vector<int>& y,
                         const std::vector<double>& costs, const KernelSpec& kernel,
                         const SvmTrainOptions& options = {});

// Same solver against a shared kernel cache, optionally warm-started from a
// feasible (alpha, bias) pair; used by the semi-supervised trainer.
SvmTrainResult train_svm_cached(KernelMatrix& kernel, const std::vector<int>& y,
                                const std::vector<double>& costs,
                                const SvmTrainOptions& options = {},
                                const std::vector<double>* warm_alpha = nullptr,
                                double warm_bias = 0.0);

}  // namespace s3ovs
