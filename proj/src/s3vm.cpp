#include "s3ovs/s3vm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "s3ovs/rng.hpp"

namespace s3ovs {

double unlabeled_loss(double o) { return std::max(0.0, 1.0 - std::abs(o)); }

double switch_gain(double o_j, double o_z) {
    return (hinge_loss(+1, o_j) + hinge_loss(-1, o_z)) -
           (hinge_loss(-1, o_j) + hinge_loss(+1, o_z));
}

std::vector<int> init_labels(const std::vector<double>& decision_values, double r) {
    if (r < 0.0 || r > 1.0)
        throw std::invalid_argument("init_labels: r must lie in [0, 1]");
    const std::size_t m = decision_values.size();
    const int positives = std::clamp(round_half_up_to_int(r * static_cast<double>(m)),
                                     0, static_cast<int>(m));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return decision_values[a] > decision_values[b];
    });
    std::vector<int> labels(m, -1);
    for (int i = 0; i < positives; ++i) labels[order[static_cast<std::size_t>(i)]] = +1;
    return labels;
}

std::vector<int> init_labels(const SvmModel& model, const Matrix& unlabeled, double r) {
    std::vector<double> values(unlabeled.rows());
    for (std::size_t i = 0; i < unlabeled.rows(); ++i)
        values[i] = decision_value(model, unlabeled.row(i));
    return init_labels(values, r);
}

double s3vm_objective(const SvmModel& model, const Matrix& labeled_x,
                      const std::vector<int>& labeled_y, double lambda,
                      const Matrix& unlabeled_x, const std::vector<int>& unlabeled_y,
                      double unlabeled_cost) {
    double obj = 0.5 * w_norm_sq(model);
    for (std::size_t i = 0; i < labeled_x.rows(); ++i)
        obj += lambda * hinge_loss(labeled_y[i], decision_value(model, labeled_x.row(i)));
    for (std::size_t j = 0; j < unlabeled_x.rows(); ++j)
        obj += unlabeled_cost *
               hinge_loss(unlabeled_y[j], decision_value(model, unlabeled_x.row(j)));
    return obj;
}

namespace {

std::vector<double> stage_costs(const S3vmConfig& config) {
    const double target = config.lambda_unlabeled;
    double factor = config.annealing.start_factor;
    if (!(factor > 0.0) || factor > 1.0)
        throw std::invalid_argument("train_s3vm: annealing start factor must be in (0, 1]");
    if (!(config.annealing.multiplier > 1.0))
        throw std::invalid_argument("train_s3vm: annealing multiplier must be > 1");
    std::vector<double> costs;
    for (; factor < 1.0; factor *= config.annealing.multiplier)
        costs.push_back(factor * target);
    costs.push_back(target);
    return costs;
}

// Objective of Eq-style primal from the solver's own state: the decision
// values on the training patterns are exact under the returned (w, b).
double primal_from_result(const SvmTrainResult& fit, const std::vector<int>& y_all,
                          std::size_t n_labeled, double lambda, double unlabeled_cost) {
    double obj = 0.5 * fit.w_norm_sq;
    for (std::size_t i = 0; i < y_all.size(); ++i) {
        const double cost = i < n_labeled ? lambda : unlabeled_cost;
        obj += cost * hinge_loss(y_all[i], fit.decision_values[i]);
    }
    return obj;
}

}  // namespace

S3vmResult train_s3vm(const Dataset& labeled, const Matrix& unlabeled,
                      const S3vmConfig& config) {
    const std::size_t n = labeled.size();
    const std::size_t m = unlabeled.rows();
    for (Supervision s : labeled.supervision)
        if (s != Supervision::labeled)
            throw std::invalid_argument("train_s3vm: labeled set contains unlabeled rows");
    if (m > 0 && unlabeled.cols() != labeled.dim())
        throw std::invalid_argument("train_s3vm: dimension mismatch");

    std::vector<double> base_costs(n, config.lambda_labeled);
    const SvmTrainResult base =
        train_svm(labeled.features, labeled.labels, base_costs, config.kernel, config.svm);

    S3vmResult result;
    if (m == 0) {
        result.model = base.model;
        result.final_objective = primal_from_result(base, labeled.labels, n,
                                                    config.lambda_labeled, 0.0);
        result.converged = base.converged;
        return result;
    }

    result.synthetic_labels = init_labels(base.model, unlabeled, config.balance_ratio);

    // Joint training set: labeled block first, unlabeled block after it.
    Matrix x_all = labeled.features;
    x_all.reserve_rows(n + m);
    for (std::size_t j = 0; j < m; ++j) x_all.append_row(unlabeled.row(j));
    KernelMatrix kernel_cache(x_all, config.kernel);

    std::vector<int> y_all = labeled.labels;
    y_all.insert(y_all.end(), result.synthetic_labels.begin(),
                 result.synthetic_labels.end());

    std::vector<double> costs(n + m, config.lambda_labeled);
    std::vector<double> alpha(n + m, 0.0);
    std::copy(base.alpha.begin(), base.alpha.end(), alpha.begin());
    double bias = base.model.bias;

    const int switch_cap = config.max_switches_per_stage > 0
                               ? config.max_switches_per_stage
                               : 50 * static_cast<int>(m) + 100;

    SvmTrainResult fit;
    for (double cost : stage_costs(config)) {
        S3vmStage stage;
        stage.unlabeled_cost = cost;
        std::fill(costs.begin() + static_cast<std::ptrdiff_t>(n), costs.end(), cost);
        for (;;) {
            fit = train_svm_cached(kernel_cache, y_all, costs, config.svm, &alpha, bias);
            if (!fit.converged) result.converged = false;
            alpha = fit.alpha;
            bias = fit.model.bias;
            stage.objectives.push_back(primal_from_result(fit, y_all, n,
                                                          config.lambda_labeled, cost));

            if (stage.switches >= switch_cap) {
                result.converged = false;
                break;
            }

            // Best admissible pair: the gain splits into a per-pattern term,
            // so the maximizing pair combines the worst positive with the
            // worst negative.
            double best_pos = -1.0, best_neg = -1.0;
            std::size_t arg_pos = 0, arg_neg = 0;
            bool has_pos = false, has_neg = false;
            for (std::size_t j = 0; j < m; ++j) {
                const double o = fit.decision_values[n + j];
                if (y_all[n + j] == +1) {
                    const double part = hinge_loss(+1, o) - hinge_loss(-1, o);
                    if (!has_pos || part > best_pos) {
                        best_pos = part;
                        arg_pos = j;
                        has_pos = true;
                    }
                } else {
                    const double part = hinge_loss(-1, o) - hinge_loss(+1, o);
                    if (!has_neg || part > best_neg) {
                        best_neg = part;
                        arg_neg = j;
                        has_neg = true;
                    }
                }
            }
            if (!has_pos || !has_neg || best_pos + best_neg <= config.gain_epsilon) break;

            y_all[n + arg_pos] = -1;
            y_all[n + arg_neg] = +1;
            // Swapping the two alphas keeps sum(alpha_i y_i) = 0 and both box
            // constraints, so the next solve can warm start.
            std::swap(alpha[n + arg_pos], alpha[n + arg_neg]);
            ++stage.switches;
        }
        result.switch_count += stage.switches;
        result.stages.push_back(std::move(stage));
    }

    result.model = fit.model;
    std::copy(y_all.begin() + static_cast<std::ptrdiff_t>(n), y_all.end(),
              result.synthetic_labels.begin());
    result.final_objective = result.stages.back().objectives.back();
    return result;
}

EnsembleModel train_ensemble(const Dataset& labeled, const OversamplePlan& plan,
                             const S3vmConfig& config, int members) {
    if (members < 1 || members % 2 == 0)
        throw std::invalid_argument("train_ensemble: member count must be odd");
    EnsembleModel ensemble;
    ensemble.members.reserve(static_cast<std::size_t>(members));
    for (int i = 0; i < members; ++i) {
        EnsembleMember member;
        member.seed = mix_seed(plan.seed, static_cast<std::uint64_t>(i));
        OversamplePlan member_plan = plan;
        member_plan.seed = member.seed;
        try {
            const SyntheticBatch batch = convex_oversample(labeled, member_plan);
            member.result = train_s3vm(labeled, batch.patterns, config);
        } catch (const std::exception& e) {
            throw std::runtime_error("train_ensemble: member " + std::to_string(i) +
                                     " failed: " + e.what());
        }
        ensemble.members.push_back(std::move(member));
    }
    return ensemble;
}

std::vector<int> ensemble_predict(const EnsembleModel& ensemble, const Matrix& x) {
    if (ensemble.members.empty())
        throw std::invalid_argument("ensemble_predict: empty ensemble");
    std::vector<int> votes(x.rows(), 0);
    for (const EnsembleMember& member : ensemble.members) {
        const std::vector<int> labels = predict(member.result.model, x);
        for (std::size_t i = 0; i < labels.size(); ++i) votes[i] += labels[i];
    }
    std::vector<int> out(x.rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = votes[i] > 0 ? +1 : -1;
    return out;
}

}  // namespace s3ovs
