#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s3ovs/csv.hpp"
#include "s3ovs/dataset.hpp"
#include "s3ovs/kernel.hpp"
#include "s3ovs/metrics.hpp"

namespace s3ovs {

enum class ExperimentKind { synthetic_grid, small_sample, imbalanced };

enum class MethodKind {
    svm,            // supervised SVM on the full training fold
    s_mcar,         // supervised SVM after MCAR removal
    svm_ovs,        // removal + naive-labeled convex over-sampling
    s3vm_real,      // removal + removed patterns reinserted unlabeled
    s3vm_ovs_classdep,
    s3vm_ovs_classindep,
    s3vm_ensemble,
};

struct MethodSpec {
    MethodKind kind = MethodKind::svm;
    std::string name;
};

MethodSpec parse_method(const std::string& name);
bool method_is_s3vm(MethodKind kind);
bool method_uses_oversampling(MethodKind kind);

struct DatasetSource {
    std::string name;
    // file backed
    std::string path;
    std::string label_column = "label";
    std::vector<std::string> nominal_columns;
    LabelMap label_map;
    // generator backed
    bool is_generator = false;
    GeneratorSpec generator;
    bool generator_seed_fixed = false;  // JSON gave an explicit seed
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::small_sample;
    std::vector<DatasetSource> datasets;
    std::vector<double> ratios{0.2, 0.5, 0.8};
    std::vector<MethodSpec> methods;
    std::vector<double> cost_grid{0.1, 1.0, 10.0};
    std::vector<double> gamma_grid{0.1, 1.0, 10.0};
    std::vector<double> lambda_star_grid{0.1, 1.0, 10.0};
    std::vector<double> r_grid{0.5, 0.7, 0.9};
    KernelKind kernel = KernelKind::rbf;
    int folds = 10;
    int repeats = 3;
    int inner_folds = 3;
    int knn_k = 5;
    int ensemble_members = 51;
    bool standardize = false;
    std::uint64_t base_seed = 1;
    int workers = 0;  // 0 = hardware concurrency
    std::string output_dir = "out";
    double svm_tol = 1e-3;
};

ExperimentConfig load_experiment_config(const std::string& path);
Dataset load_source(const DatasetSource& source, std::uint64_t base_seed);

struct SelectedParams {
    double cost = 1.0;
    double gamma = 1.0;
    double lambda_star = 1.0;
    double r = 0.5;
    bool has_gamma = false;
    bool has_lambda_star = false;
    bool has_r = false;
};

// Books kept for the information-hygiene checks; never serialized.
struct CellAudit {
    std::vector<std::int64_t> labeled_train_ids;
    std::vector<std::int64_t> unlabeled_real_ids;   // reinserted removed patterns
    std::vector<std::int64_t> synthetic_seed_ids;   // lineage of synthetic patterns
    std::vector<std::int64_t> test_ids;
    std::size_t synthetic_labeled_count = 0;        // naive-labeled synthetics
    std::size_t synthetic_unlabeled_count = 0;
};

struct RunRecord {
    std::string dataset;
    std::string method;
    double ratio = 0.0;
    int repeat = 0;
    int fold = 0;
    bool skipped = false;
    std::string skip_reason;
    SelectedParams params;
    MetricsReport report;
    double wall_ms = 0.0;  // in-memory only; cells.csv stays byte-stable
    CellAudit audit;       // in-memory only
};

struct NamedDataset {
    std::string name;
    Dataset data;
};

RunRecord run_cell(const NamedDataset& dataset, const MethodSpec& method, double ratio,
                   int repeat, int fold, const ExperimentConfig& config);

std::string cells_csv_header();
std::string record_to_csv_row(const RunRecord& record);
std::vector<RunRecord> parse_cells_csv(const std::string& path);

struct ExperimentOutput {
    std::vector<RunRecord> records;
};

// Runs every (dataset, method, ratio, repeat, fold) cell on a bounded worker
// pool and writes cells.csv, summary.csv, ranks_<metric>_<ratio>.csv,
// friedman.txt and skipped.txt under config.output_dir.
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Report generation from existing records (the `report` subcommand).
void write_reports(const std::vector<RunRecord>& records, const std::string& output_dir);

}  // namespace s3ovs
