// s3ovs: convex-combination over-sampling and semi-supervised SVMs for
// small/imbalanced binary classification experiments.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "s3ovs/csv.hpp"
#include "s3ovs/dataset.hpp"
#include "s3ovs/experiment.hpp"
#include "s3ovs/metrics.hpp"
#include "s3ovs/model_io.hpp"
#include "s3ovs/oversample.hpp"
#include "s3ovs/s3vm.hpp"
#include "s3ovs/svm.hpp"

namespace {

using namespace s3ovs;

struct GenArgs {
    GeneratorSpec spec;
    std::string out;
};

struct McarArgs {
    std::string in, kept, removed;
    double ratio = 0.5;
    std::string mode = "both";
    std::uint64_t seed = 0;
};

struct OversampleArgs {
    std::string in, out;
    int k = 5;
    int m = 0;
    std::string class_mode = "independent";
    std::uint64_t seed = 0;
};

struct TrainArgs {
    std::string method = "svm";
    std::string in, unlabeled, model_out;
    double lambda = 1.0;
    double lambda_star = 1.0;
    double r = -1.0;  // negative = labeled class ratio
    std::string kernel = "rbf";
    double gamma = 1.0;
    int members = 1;
    double tol = 1e-3;
};

struct EvaluateArgs {
    std::string model, in, pred_out;
    int positive = 0;  // 0 = minority class of the test file
};

int run_gen(const GenArgs& args) {
    const Dataset data = generate_gaussian_task(args.spec);
    write_dataset_csv(args.out, data);
    std::cout << "wrote " << data.size() << " patterns (d=" << data.dim() << ") to "
              << args.out << "\n";
    return 0;
}

int run_mcar(const McarArgs& args) {
    const Dataset data = load_csv(args.in);
    const McarMode mode =
        args.mode == "minority" ? McarMode::minority_only : McarMode::both_stratified;
    const McarSplit split = remove_mcar(data, args.ratio, mode, args.seed);
    write_dataset_csv(args.kept, split.kept);
    write_dataset_csv(args.removed, split.removed);
    std::cout << "kept " << split.kept.size() << ", removed " << split.removed.size()
              << "\n";
    return 0;
}

int run_oversample(const OversampleArgs& args) {
    const Dataset data = load_csv(args.in);
    OversamplePlan plan;
    plan.k = args.k;
    plan.m = args.m;
    plan.seed = args.seed;
    plan.class_mode = args.class_mode == "dependent" ? ClassMode::class_dependent
                                                     : ClassMode::class_independent;
    const SyntheticBatch batch = convex_oversample(data, plan);
    write_batch_csv(args.out, batch);
    std::cout << "wrote " << batch.patterns.rows() << " synthetic patterns to "
              << args.out << "\n";
    return 0;
}

int run_train(const TrainArgs& args) {
    const Dataset labeled = load_csv(args.in);
    KernelSpec kernel;
    kernel.kind = args.kernel == "linear" ? KernelKind::linear : KernelKind::rbf;
    kernel.gamma = args.gamma;

    if (args.method == "svm") {
        const std::vector<double> costs(labeled.size(), args.lambda);
        SvmTrainOptions opts;
        opts.tol = args.tol;
        const SvmTrainResult fit =
            train_svm(labeled.features, labeled.labels, costs, kernel, opts);
        save_model_file(args.model_out, fit.model);
        std::cout << "svm: " << fit.model.support_count() << " support vectors, "
                  << (fit.converged ? "converged" : "NOT converged") << "\n";
        return 0;
    }
    if (args.method != "s3vm") {
        std::cerr << "unknown method '" << args.method << "' (svm | s3vm)\n";
        return 1;
    }

    Matrix unlabeled(0, labeled.dim());
    if (!args.unlabeled.empty()) unlabeled = load_features_csv(args.unlabeled);
    S3vmConfig config;
    config.lambda_labeled = args.lambda;
    config.lambda_unlabeled = args.lambda_star;
    config.balance_ratio =
        args.r >= 0.0 ? args.r
                      : static_cast<double>(labeled.count_label(+1)) /
                            static_cast<double>(labeled.size());
    config.kernel = kernel;
    config.svm.tol = args.tol;

    if (args.members > 1) {
        OversamplePlan plan;
        plan.m = static_cast<int>(unlabeled.rows());
        plan.k = 5;
        plan.class_mode = ClassMode::class_dependent;
        plan.seed = 1;
        if (plan.m == 0) {
            std::cerr << "ensemble training needs --unlabeled to size the batches\n";
            return 1;
        }
        const EnsembleModel ensemble =
            train_ensemble(labeled, plan, config, args.members);
        save_model_file(args.model_out, ensemble);
        std::cout << "ensemble: " << ensemble.members.size() << " members\n";
        return 0;
    }

    const S3vmResult fit = train_s3vm(labeled, unlabeled, config);
    save_model_file(args.model_out, fit);
    std::cout << "s3vm: objective " << fit.final_objective << ", " << fit.switch_count
              << " switches, " << (fit.converged ? "converged" : "NOT converged")
              << "\n";
    return 0;
}

int run_evaluate(const EvaluateArgs& args) {
    const Dataset test = load_csv(args.in);
    const AnyModel model = load_model_file(args.model);
    const std::vector<int> predicted = predict_any(model, test.features);
    const int positive = args.positive != 0 ? args.positive : test.minority_class();
    const MetricsReport report = metrics(test.labels, predicted, positive);
    std::cout << "n=" << test.size() << " positive_class=" << report.positive_class
              << "\nacc=" << report.acc << " macc=" << report.macc
              << " gm=" << report.gm << "\ns_pos=" << report.s_pos
              << " s_neg=" << report.s_neg << " (tp=" << report.tp
              << " fp=" << report.fp << " tn=" << report.tn << " fn=" << report.fn
              << ")\n";
    if (!args.pred_out.empty()) {
        std::ofstream out(args.pred_out);
        out << "id,prediction\n";
        for (std::size_t i = 0; i < test.size(); ++i)
            out << test.ids[i] << ',' << predicted[i] << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convex-combination over-sampling + semi-supervised SVM toolkit"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a bi-modal Gaussian task");
    gen->add_option("--d", gen_args.spec.d, "dimensions")->required();
    gen->add_option("--n", gen_args.spec.n, "patterns (even)")->required();
    gen->add_option("--v", gen_args.spec.v, "mode standard deviation")->required();
    gen->add_option("--seed", gen_args.spec.seed, "seed")->default_val(0);
    gen->add_option("--out", gen_args.out, "output CSV")->required();

    McarArgs mcar_args;
    auto* mcar = app.add_subcommand("mcar", "remove patterns completely at random");
    mcar->add_option("--in", mcar_args.in, "input CSV")->required();
    mcar->add_option("--ratio", mcar_args.ratio, "removal ratio in [0,1)")->required();
    mcar->add_option("--mode", mcar_args.mode, "both | minority")->default_val("both");
    mcar->add_option("--seed", mcar_args.seed, "seed")->default_val(0);
    mcar->add_option("--kept", mcar_args.kept, "kept output CSV")->required();
    mcar->add_option("--removed", mcar_args.removed, "removed output CSV")->required();

    OversampleArgs ovs_args;
    auto* ovs = app.add_subcommand("oversample", "convex-combination over-sampling");
    ovs->add_option("--in", ovs_args.in, "input CSV")->required();
    ovs->add_option("--k", ovs_args.k, "neighbor count")->default_val(5);
    ovs->add_option("--m", ovs_args.m, "synthetic pattern count")->required();
    ovs->add_option("--class-mode", ovs_args.class_mode, "dependent | independent")
        ->default_val("independent");
    ovs->add_option("--seed", ovs_args.seed, "seed")->default_val(0);
    ovs->add_option("--out", ovs_args.out, "output CSV with lineage columns")->required();

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train an SVM or S3VM model");
    train->add_option("--method", train_args.method, "svm | s3vm")->default_val("svm");
    train->add_option("--in", train_args.in, "labeled CSV")->required();
    train->add_option("--unlabeled", train_args.unlabeled, "unlabeled CSV (s3vm)");
    train->add_option("--lambda", train_args.lambda, "labeled cost")->default_val(1.0);
    train->add_option("--lambda-star", train_args.lambda_star, "unlabeled cost")
        ->default_val(1.0);
    train->add_option("--r", train_args.r, "positive balance ratio (default: labeled ratio)");
    train->add_option("--kernel", train_args.kernel, "linear | rbf")->default_val("rbf");
    train->add_option("--gamma", train_args.gamma, "rbf width")->default_val(1.0);
    train->add_option("--members", train_args.members, "odd ensemble size (s3vm)")
        ->default_val(1);
    train->add_option("--tol", train_args.tol, "solver KKT tolerance")->default_val(1e-3);
    train->add_option("--model-out", train_args.model_out, "model file")->required();

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "score a model on labeled data");
    evaluate->add_option("--model", eval_args.model, "model file")->required();
    evaluate->add_option("--in", eval_args.in, "labeled CSV")->required();
    evaluate->add_option("--positive", eval_args.positive,
                         "positive class (+1 or -1; default minority)");
    evaluate->add_option("--pred-out", eval_args.pred_out, "write predictions CSV");

    std::string config_path;
    auto* experiment = app.add_subcommand("experiment", "run a full experiment config");
    experiment->add_option("--config", config_path, "JSON config")->required();

    std::string cells_path, report_dir;
    auto* report = app.add_subcommand("report", "rebuild reports from cells.csv");
    report->add_option("--cells", cells_path, "cells.csv path")->required();
    report->add_option("--out-dir", report_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(gen_args);
        if (mcar->parsed()) return run_mcar(mcar_args);
        if (ovs->parsed()) return run_oversample(ovs_args);
        if (train->parsed()) return run_train(train_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (experiment->parsed()) {
            const ExperimentConfig config = load_experiment_config(config_path);
            const ExperimentOutput output = run_experiment(config);
            std::size_t skipped = 0;
            for (const RunRecord& r : output.records) skipped += r.skipped ? 1 : 0;
            std::cout << output.records.size() << " cells (" << skipped
                      << " skipped) -> " << config.output_dir << "\n";
            return 0;
        }
        if (report->parsed()) {
            write_reports(parse_cells_csv(cells_path), report_dir);
            std::cout << "reports written to " << report_dir << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
