#pragma once

#include <cstdint>
#include <vector>

#include "s3ovs/dataset.hpp"
#include "s3ovs/oversample.hpp"
#include "s3ovs/svm.hpp"

namespace s3ovs {

// Loss of an unlabeled pattern under the better of the two label choices:
// min(hinge(+1, o), hinge(-1, o)) = max(0, 1 - |o|).
double unlabeled_loss(double o);

// Improvement in total hinge loss from swapping the labels of a currently
// positive pattern (output o_j) and a currently negative one (output o_z).
double switch_gain(double o_j, double o_z);

// Assigns +1 to the round(r*m) patterns with the largest decision values
// (round half up), ties broken by smaller index.
std::vector<int> init_labels(const std::vector<double>& decision_values, double r);
std::vector<int> init_labels(const SvmModel& model, const Matrix& unlabeled, double r);

struct AnnealingSchedule {
    double start_factor = 1e-5;  // first stage cost = start_factor * lambda_unlabeled
    double multiplier = 2.0;
};

struct S3vmConfig {
    double lambda_labeled = 1.0;    // hinge cost per labeled pattern
    double lambda_unlabeled = 1.0;  // final hinge cost per unlabeled pattern
    double balance_ratio = 0.5;     // fraction of unlabeled assigned +1
    AnnealingSchedule annealing;
    KernelSpec kernel;
    double gain_epsilon = 1e-8;
    SvmTrainOptions svm;
    int max_switches_per_stage = 0;  // 0 = 50*m + 100
};

struct S3vmStage {
    double unlabeled_cost = 0.0;
    std::vector<double> objectives;  // primal objective after each retrain
    int switches = 0;
};

struct S3vmResult {
    SvmModel model;
    std::vector<int> synthetic_labels;  // y*, one per unlabeled pattern
    std::vector<S3vmStage> stages;
    int switch_count = 0;
    double final_objective = 0.0;
    bool converged = true;
};

// Label-switching semi-supervised SVM: labels the unlabeled patterns with an
// SVM trained on the labeled set (restricted to the balance ratio), then
// anneals the unlabeled cost upward, alternating full SVM retrains with the
// single best admissible label swap until no swap improves the loss.
S3vmResult train_s3vm(const Dataset& labeled, const Matrix& unlabeled,
                      const S3vmConfig& config);

// Primal objective: 0.5*||w||^2 + lambda * labeled hinge + unlabeled_cost *
// hinge at the committed labels. Evaluates the model from scratch; the
// trainer itself uses the solver's cached decision values instead.
double s3vm_objective(const SvmModel& model, const Matrix& labeled_x,
                      const std::vector<int>& labeled_y, double lambda,
                      const Matrix& unlabeled_x, const std::vector<int>& unlabeled_y,
                      double unlabeled_cost);

struct EnsembleMember {
    std::uint64_t seed = 0;  // over-sampling seed, the member's lineage
    S3vmResult result;
};

struct EnsembleModel {
    std::vector<EnsembleMember> members;
};

// Trains `members` independent S3VMs, each on its own synthetic batch drawn
// with a seed derived from plan.seed. Member count must be odd.
EnsembleModel train_ensemble(const Dataset& labeled, const OversamplePlan& plan,
                             const S3vmConfig& config, int members);

std::vector<int> ensemble_predict(const EnsembleModel& ensemble, const Matrix& x);

}  // namespace s3ovs
