#include "s3ovs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "s3ovs/oversample.hpp"
#include "s3ovs/ranking.hpp"
#include "s3ovs/rng.hpp"
#include "s3ovs/s3vm.hpp"
#include "s3ovs/svm.hpp"

namespace s3ovs {

namespace {

const std::vector<std::pair<std::string, MethodKind>> kMethodNames = {
    {"SVM", MethodKind::svm},
    {"S-MCAR", MethodKind::s_mcar},
    {"SVM+OvS", MethodKind::svm_ovs},
    {"S3VM-Real", MethodKind::s3vm_real},
    {"S3VM-OvS-classdep", MethodKind::s3vm_ovs_classdep},
    {"S3VM-OvS-classindep", MethodKind::s3vm_ovs_classindep},
    {"S3VM-Ensemble", MethodKind::s3vm_ensemble},
};

double positive_fraction(const Dataset& d) {
    return static_cast<double>(d.count_label(+1)) / static_cast<double>(d.size());
}

}  // namespace

MethodSpec parse_method(const std::string& name) {
    for (const auto& [known, kind] : kMethodNames)
        if (known == name) return {kind, known};
    std::string all;
    for (const auto& [known, kind] : kMethodNames) all += known + " ";
    throw std::runtime_error("unknown method '" + name + "'; registry: " + all);
}

bool method_is_s3vm(MethodKind kind) {
    return kind == MethodKind::s3vm_real || kind == MethodKind::s3vm_ovs_classdep ||
           kind == MethodKind::s3vm_ovs_classindep || kind == MethodKind::s3vm_ensemble;
}

bool method_uses_oversampling(MethodKind kind) {
    return kind == MethodKind::svm_ovs || kind == MethodKind::s3vm_ovs_classdep ||
           kind == MethodKind::s3vm_ovs_classindep || kind == MethodKind::s3vm_ensemble;
}

Dataset load_source(const DatasetSource& source, std::uint64_t base_seed) {
    if (source.is_generator) {
        GeneratorSpec spec = source.generator;
        if (!source.generator_seed_fixed)
            spec.seed = mix_seed(base_seed, hash_string(source.name));
        return generate_gaussian_task(spec);
    }
    Table table = load_table(source.path);
    if (!source.nominal_columns.empty())
        table = one_hot_encode(table, source.nominal_columns);
    return table_to_dataset(table, source.label_column, source.label_map);
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : object.items())
        if (!allowed.contains(key))
            throw std::runtime_error("config: unknown key '" + key + "' in " + where);
}

GeneratorSpec parse_generator(const json& g, bool& seed_fixed) {
    reject_unknown_keys(g, {"d", "n", "v", "seed"}, "generator");
    GeneratorSpec spec;
    spec.d = g.at("d").get<int>();
    spec.n = g.at("n").get<int>();
    spec.v = g.at("v").get<double>();
    seed_fixed = g.contains("seed");
    if (seed_fixed) spec.seed = g.at("seed").get<std::uint64_t>();
    return spec;
}

DatasetSource parse_dataset_source(const json& d) {
    reject_unknown_keys(
        d, {"name", "path", "label_column", "nominal_columns", "label_map", "generator"},
        "datasets[]");
    DatasetSource source;
    source.name = d.at("name").get<std::string>();
    if (d.contains("generator")) {
        source.is_generator = true;
        source.generator = parse_generator(d.at("generator"), source.generator_seed_fixed);
        return source;
    }
    source.path = d.at("path").get<std::string>();
    if (d.contains("label_column"))
        source.label_column = d.at("label_column").get<std::string>();
    if (d.contains("nominal_columns"))
        source.nominal_columns = d.at("nominal_columns").get<std::vector<std::string>>();
    if (d.contains("label_map")) {
        source.label_map.mapping.clear();
        for (const auto& [token, value] : d.at("label_map").items())
            source.label_map.mapping[token] = value.get<int>();
    }
    return source;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json root = json::parse(in);
    reject_unknown_keys(root,
                        {"kind", "datasets", "ratios", "methods", "cost_grid",
                         "gamma_grid", "lambda_star_grid", "r_grid", "kernel", "folds",
                         "repeats", "inner_folds", "knn_k", "ensemble_members",
                         "standardize", "base_seed", "workers", "output_dir", "svm_tol"},
                        "config");

    ExperimentConfig config;
    const std::string kind = root.at("kind").get<std::string>();
    if (kind == "synthetic_grid") config.kind = ExperimentKind::synthetic_grid;
    else if (kind == "small_sample") config.kind = ExperimentKind::small_sample;
    else if (kind == "imbalanced") config.kind = ExperimentKind::imbalanced;
    else throw std::runtime_error("config: unknown kind '" + kind + "'");

    for (const json& d : root.at("datasets")) config.datasets.push_back(parse_dataset_source(d));
    if (config.datasets.empty()) throw std::runtime_error("config: no datasets");

    for (const json& m : root.at("methods"))
        config.methods.push_back(parse_method(m.get<std::string>()));
    if (config.methods.empty()) throw std::runtime_error("config: no methods");

    if (root.contains("ratios")) config.ratios = root.at("ratios").get<std::vector<double>>();
    for (double r : config.ratios)
        if (r < 0.0 || r >= 1.0) throw std::runtime_error("config: ratios must lie in [0, 1)");

    if (root.contains("cost_grid")) config.cost_grid = root.at("cost_grid").get<std::vector<double>>();
    if (root.contains("gamma_grid")) config.gamma_grid = root.at("gamma_grid").get<std::vector<double>>();
    if (root.contains("lambda_star_grid"))
        config.lambda_star_grid = root.at("lambda_star_grid").get<std::vector<double>>();
    if (root.contains("r_grid")) config.r_grid = root.at("r_grid").get<std::vector<double>>();
    if (config.cost_grid.empty() || config.gamma_grid.empty() ||
        config.lambda_star_grid.empty() || config.r_grid.empty())
        throw std::runtime_error("config: grids must be nonempty");

    if (root.contains("kernel")) {
        const std::string k = root.at("kernel").get<std::string>();
        if (k == "linear") config.kernel = KernelKind::linear;
        else if (k == "rbf") config.kernel = KernelKind::rbf;
        else throw std::runtime_error("config: unknown kernel '" + k + "'");
    }
    if (root.contains("folds")) config.folds = root.at("folds").get<int>();
    if (root.contains("repeats")) config.repeats = root.at("repeats").get<int>();
    if (root.contains("inner_folds")) config.inner_folds = root.at("inner_folds").get<int>();
    if (root.contains("knn_k")) config.knn_k = root.at("knn_k").get<int>();
    if (root.contains("ensemble_members"))
        config.ensemble_members = root.at("ensemble_members").get<int>();
    config.standardize = config.kind != ExperimentKind::synthetic_grid;
    if (root.contains("standardize")) config.standardize = root.at("standardize").get<bool>();
    if (root.contains("base_seed")) config.base_seed = root.at("base_seed").get<std::uint64_t>();
    if (root.contains("workers")) config.workers = root.at("workers").get<int>();
    if (root.contains("output_dir")) config.output_dir = root.at("output_dir").get<std::string>();
    if (root.contains("svm_tol")) config.svm_tol = root.at("svm_tol").get<double>();

    if (config.folds < 2) throw std::runtime_error("config: folds must be >= 2");
    if (config.repeats < 1) throw std::runtime_error("config: repeats must be >= 1");
    if (config.inner_folds < 2) throw std::runtime_error("config: inner_folds must be >= 2");
    if (config.ensemble_members < 1 || config.ensemble_members % 2 == 0)
        throw std::runtime_error("config: ensemble_members must be odd");
    return config;
}

// ---------------------------------------------------------------------------
// Cell execution

namespace {

struct FitContext {
    const ExperimentConfig* config = nullptr;
    const Dataset* removed = nullptr;  // unlabeled source for S3VM-Real
    int quota_pos = 0;
    int quota_neg = 0;
    std::uint64_t ovs_seed = 0;
};

OversamplePlan make_plan(const Dataset& train, MethodKind kind, const FitContext& ctx) {
    OversamplePlan plan;
    plan.m = ctx.quota_pos + ctx.quota_neg;
    plan.seed = ctx.ovs_seed;
    plan.class_mode = kind == MethodKind::s3vm_ovs_classindep
                          ? ClassMode::class_independent
                          : ClassMode::class_dependent;
    if (plan.class_mode == ClassMode::class_dependent) {
        plan.quota_pos = ctx.quota_pos;
        plan.quota_neg = ctx.quota_neg;
    }
    // Clamp k to the smallest pool that actually gets sampled.
    std::size_t min_pool = train.size();
    if (plan.class_mode == ClassMode::class_dependent) {
        if (ctx.quota_pos > 0) min_pool = std::min(min_pool, train.count_label(+1));
        if (ctx.quota_neg > 0) min_pool = std::min(min_pool, train.count_label(-1));
    }
    if (min_pool < 2 && plan.m > 0)
        throw std::runtime_error("over-sampling pool has fewer than 2 patterns");
    plan.k = std::min<int>(ctx.config->knn_k, static_cast<int>(min_pool) - 1);
    return plan;
}

S3vmConfig make_s3vm_config(const Dataset& train, const SelectedParams& params,
                            const FitContext& ctx) {
    S3vmConfig cfg;
    cfg.lambda_labeled = params.cost;
    cfg.lambda_unlabeled = params.lambda_star;
    cfg.balance_ratio = params.has_r ? params.r : positive_fraction(train);
    cfg.kernel.kind = ctx.config->kernel;
    cfg.kernel.gamma = params.gamma;
    cfg.svm.tol = ctx.config->svm_tol;
    return cfg;
}

KernelSpec make_kernel(const SelectedParams& params, const FitContext& ctx) {
    return {ctx.config->kernel, params.gamma};
}

// Trains one method on `train` and predicts `eval_x`. The audit pointer
// collects what entered training when the caller is the outer cell.
std::vector<int> fit_and_predict(const Dataset& train, const Matrix& eval_x,
                                 MethodKind kind, const SelectedParams& params,
                                 const FitContext& ctx, CellAudit* audit) {
    if (audit != nullptr) audit->labeled_train_ids = train.ids;

    switch (kind) {
        case MethodKind::svm:
        case MethodKind::s_mcar: {
            const std::vector<double> costs(train.size(), params.cost);
            const SvmTrainOptions opts{ctx.config->svm_tol};
            const auto fit = train_svm(train.features, train.labels, costs,
                                       make_kernel(params, ctx), opts);
            return predict(fit.model, eval_x);
        }
        case MethodKind::svm_ovs: {
            const OversamplePlan plan = make_plan(train, kind, ctx);
            const SyntheticBatch batch = convex_oversample(train, plan);
            // Naive labelling: a synthetic pattern inherits its seeds' class.
            Dataset augmented = train;
            std::int64_t next_id = train.max_id() + 1;
            for (std::size_t j = 0; j < batch.patterns.rows(); ++j)
                augmented.append_pattern(batch.patterns.row(j), batch.class_of_seeds[j],
                                         next_id++, Origin::synthetic,
                                         Supervision::labeled);
            if (audit != nullptr) {
                audit->synthetic_seed_ids = batch.seed_i_ids;
                audit->synthetic_seed_ids.insert(audit->synthetic_seed_ids.end(),
                                                 batch.seed_h_ids.begin(),
                                                 batch.seed_h_ids.end());
                audit->synthetic_labeled_count = batch.patterns.rows();
            }
            const std::vector<double> costs(augmented.size(), params.cost);
            const SvmTrainOptions opts{ctx.config->svm_tol};
            const auto fit = train_svm(augmented.features, augmented.labels, costs,
                                       make_kernel(params, ctx), opts);
            return predict(fit.model, eval_x);
        }
        case MethodKind::s3vm_real: {
            if (audit != nullptr) audit->unlabeled_real_ids = ctx.removed->ids;
            const S3vmConfig cfg = make_s3vm_config(train, params, ctx);
            const S3vmResult fit = train_s3vm(train, ctx.removed->features, cfg);
            return predict(fit.model, eval_x);
        }
        case MethodKind::s3vm_ovs_classdep:
        case MethodKind::s3vm_ovs_classindep: {
            const OversamplePlan plan = make_plan(train, kind, ctx);
            const SyntheticBatch batch = convex_oversample(train, plan);
            if (audit != nullptr) {
                audit->synthetic_seed_ids = batch.seed_i_ids;
                audit->synthetic_seed_ids.insert(audit->synthetic_seed_ids.end(),
                                                 batch.seed_h_ids.begin(),
                                                 batch.seed_h_ids.end());
                audit->synthetic_unlabeled_count = batch.patterns.rows();
            }
            const S3vmConfig cfg = make_s3vm_config(train, params, ctx);
            const S3vmResult fit = train_s3vm(train, batch.patterns, cfg);
            return predict(fit.model, eval_x);
        }
        case MethodKind::s3vm_ensemble: {
            OversamplePlan plan = make_plan(train, kind, ctx);
            const S3vmConfig cfg = make_s3vm_config(train, params, ctx);
            const EnsembleModel ensemble =
                train_ensemble(train, plan, cfg, ctx.config->ensemble_members);
            if (audit != nullptr)
                audit->synthetic_unlabeled_count =
                    static_cast<std::size_t>(plan.m) * ensemble.members.size();
            return ensemble_predict(ensemble, eval_x);
        }
    }
    throw std::logic_error("fit_and_predict: unknown method");
}

std::vector<SelectedParams> build_grid(const MethodSpec& method,
                                       const ExperimentConfig& config) {
    std::vector<SelectedParams> grid;
    const bool with_gamma = config.kernel == KernelKind::rbf;
    const bool with_lambda_star = method_is_s3vm(method.kind);
    const bool with_r =
        method_is_s3vm(method.kind) && config.kind == ExperimentKind::imbalanced;

    const std::vector<double> gammas = with_gamma ? config.gamma_grid : std::vector<double>{1.0};
    const std::vector<double> stars =
        with_lambda_star ? config.lambda_star_grid : std::vector<double>{1.0};
    const std::vector<double> rs = with_r ? config.r_grid : std::vector<double>{0.5};

    // Ascending iteration makes "first strict maximum wins" equal to the
    // smaller-cost, smaller-gamma, smaller-lambda*, smaller-r tie break.
    for (double cost : config.cost_grid)
        for (double gamma : gammas)
            for (double star : stars)
                for (double r : rs) {
                    SelectedParams p;
                    p.cost = cost;
                    p.gamma = gamma;
                    p.lambda_star = star;
                    p.r = r;
                    p.has_gamma = with_gamma;
                    p.has_lambda_star = with_lambda_star;
                    p.has_r = with_r;
                    grid.push_back(p);
                }
    return grid;
}

// Mean GM of one parameter combo over the inner folds.
double inner_cv_score(const Dataset& kept, const SplitPlan& inner_plan, int inner_k,
                      const MethodSpec& method, const SelectedParams& params,
                      const FitContext& outer_ctx) {
    double gm_sum = 0.0;
    for (int inner = 0; inner < inner_k; ++inner) {
        const Dataset inner_train = kept.subset(inner_plan.complement_rows(inner));
        const Dataset inner_eval = kept.subset(inner_plan.fold_rows(inner));
        FitContext ctx = outer_ctx;
        ctx.ovs_seed = mix_seed(outer_ctx.ovs_seed, 1000 + static_cast<std::uint64_t>(inner));
        const std::vector<int> predicted =
            fit_and_predict(inner_train, inner_eval.features, method.kind, params, ctx,
                            nullptr);
        const int positive = inner_train.minority_class();
        gm_sum += metrics(inner_eval.labels, predicted, positive).gm;
    }
    return gm_sum / inner_k;
}

}  // namespace

RunRecord run_cell(const NamedDataset& dataset, const MethodSpec& method, double ratio,
                   int repeat, int fold, const ExperimentConfig& config) {
    RunRecord record;
    record.dataset = dataset.name;
    record.method = method.name;
    record.ratio = ratio;
    record.repeat = repeat;
    record.fold = fold;

    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t dataset_salt = hash_string(dataset.name);
    const std::uint64_t cell_salt =
        mix_seed(mix_seed(static_cast<std::uint64_t>(repeat), hash_string("fold")),
                 static_cast<std::uint64_t>(fold));

    try {
        // Folds are a function of (base seed, dataset, repeat) only, so every
        // method and ratio sees the same partition.
        const SplitPlan plan = stratified_kfold(
            dataset.data, config.folds,
            mix_seed(mix_seed(config.base_seed, dataset_salt), hash_string("folds")),
            repeat);
        const Dataset test = dataset.data.subset(plan.fold_rows(fold));
        const Dataset train_full = dataset.data.subset(plan.complement_rows(fold));
        record.audit.test_ids = test.ids;

        // The plain SVM baseline keeps the full training fold; every other
        // method works on the MCAR-reduced portion. The removal seed is
        // method independent so all methods lose the same patterns.
        Dataset kept = train_full;
        Dataset removed;
        if (method.kind != MethodKind::svm && ratio > 0.0) {
            const McarMode mode = config.kind == ExperimentKind::imbalanced
                                      ? McarMode::minority_only
                                      : McarMode::both_stratified;
            McarSplit split = remove_mcar(
                train_full, ratio, mode,
                mix_seed(mix_seed(mix_seed(config.base_seed, dataset_salt),
                                  hash_string("mcar")),
                         cell_salt));
            kept = std::move(split.kept);
            removed = std::move(split.removed);
        }

        Dataset test_view = test;
        if (config.standardize) {
            StandardizeResult std_result = standardize(kept, {test, removed});
            kept = std::move(std_result.train);
            test_view = std::move(std_result.others[0]);
            removed = std::move(std_result.others[1]);
        }
        const Dataset removed_unlabeled = as_unlabeled(removed);

        FitContext ctx;
        ctx.config = &config;
        ctx.removed = &removed_unlabeled;
        ctx.quota_pos = static_cast<int>(removed.count_label(+1));
        ctx.quota_neg = static_cast<int>(removed.count_label(-1));
        ctx.ovs_seed = mix_seed(
            mix_seed(mix_seed(config.base_seed, dataset_salt), hash_string("ovs")),
            cell_salt);

        // Hyperparameter selection by nested stratified CV maximizing GM.
        const std::vector<SelectedParams> grid = build_grid(method, config);
        SelectedParams selected = grid.front();
        if (grid.size() > 1) {
            int inner_k = config.inner_folds;
            const std::size_t min_class =
                std::min(kept.count_label(+1), kept.count_label(-1));
            if (min_class < static_cast<std::size_t>(inner_k)) inner_k = 2;
            if (min_class < 2)
                throw std::runtime_error("nested folds cannot be stratified");
            const SplitPlan inner_plan = stratified_kfold(
                kept, inner_k,
                mix_seed(mix_seed(mix_seed(config.base_seed, dataset_salt),
                                  hash_string("inner")),
                         cell_salt));
            double best_score = -1.0;
            for (const SelectedParams& candidate : grid) {
                const double score =
                    inner_cv_score(kept, inner_plan, inner_k, method, candidate, ctx);
                if (score > best_score) {
                    best_score = score;
                    selected = candidate;
                }
            }
        }
        record.params = selected;

        const std::vector<int> predicted = fit_and_predict(
            kept, test_view.features, method.kind, selected, ctx, &record.audit);
        record.report = metrics(test.labels, predicted, kept.minority_class());
    } catch (const std::exception& e) {
        record.skipped = true;
        record.skip_reason = e.what();
        for (char& c : record.skip_reason)
            if (c == ',' || c == '\n') c = ';';
    }

    record.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return record;
}

// ---------------------------------------------------------------------------
// CSV round trip

std::string cells_csv_header() {
    return "dataset,method,ratio,repeat,fold,status,reason,cost,gamma,lambda_star,r,"
           "acc,macc,gm,s_pos,s_neg,tp,fp,tn,fn,positive_class";
}

std::string record_to_csv_row(const RunRecord& r) {
    std::ostringstream os;
    os << r.dataset << ',' << r.method << ',' << format_double(r.ratio) << ','
       << r.repeat << ',' << r.fold << ',';
    if (r.skipped) {
        os << "skipped," << r.skip_reason << ",,,,,,,,,,,,,,";
        return os.str();
    }
    os << "ok,," << format_double(r.params.cost) << ','
       << (r.params.has_gamma ? format_double(r.params.gamma) : std::string{}) << ','
       << (r.params.has_lambda_star ? format_double(r.params.lambda_star) : std::string{})
       << ',' << (r.params.has_r ? format_double(r.params.r) : std::string{}) << ','
       << format_double(r.report.acc) << ',' << format_double(r.report.macc) << ','
       << format_double(r.report.gm) << ',' << format_double(r.report.s_pos) << ','
       << format_double(r.report.s_neg) << ',' << r.report.tp << ',' << r.report.fp
       << ',' << r.report.tn << ',' << r.report.fn << ',' << r.report.positive_class;
    return os.str();
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 21) cells.emplace_back();
    return cells;
}

double parse_or(const std::string& cell, double fallback) {
    if (cell.empty()) return fallback;
    return std::stod(cell);
}

}  // namespace

std::vector<RunRecord> parse_cells_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != cells_csv_header())
        throw std::runtime_error(path + ": not a cells.csv file");
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_row(line);
        RunRecord r;
        r.dataset = cells[0];
        r.method = cells[1];
        r.ratio = std::stod(cells[2]);
        r.repeat = std::stoi(cells[3]);
        r.fold = std::stoi(cells[4]);
        r.skipped = cells[5] != "ok";
        r.skip_reason = cells[6];
        if (!r.skipped) {
            r.params.cost = parse_or(cells[7], 1.0);
            r.params.has_gamma = !cells[8].empty();
            r.params.gamma = parse_or(cells[8], 1.0);
            r.params.has_lambda_star = !cells[9].empty();
            r.params.lambda_star = parse_or(cells[9], 1.0);
            r.params.has_r = !cells[10].empty();
            r.params.r = parse_or(cells[10], 0.5);
            r.report.acc = std::stod(cells[11]);
            r.report.macc = std::stod(cells[12]);
            r.report.gm = std::stod(cells[13]);
            r.report.s_pos = std::stod(cells[14]);
            r.report.s_neg = std::stod(cells[15]);
            r.report.tp = std::stol(cells[16]);
            r.report.fp = std::stol(cells[17]);
            r.report.tn = std::stol(cells[18]);
            r.report.fn = std::stol(cells[19]);
            r.report.positive_class = std::stoi(cells[20]);
        }
        records.push_back(std::move(r));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

struct GroupStats {
    int cells = 0;
    int skipped = 0;
    double acc_sum = 0, acc_sq = 0;
    double macc_sum = 0, macc_sq = 0;
    double gm_sum = 0, gm_sq = 0;

    void add(const RunRecord& r) {
        if (r.skipped) {
            ++skipped;
            return;
        }
        ++cells;
        acc_sum += r.report.acc;
        acc_sq += r.report.acc * r.report.acc;
        macc_sum += r.report.macc;
        macc_sq += r.report.macc * r.report.macc;
        gm_sum += r.report.gm;
        gm_sq += r.report.gm * r.report.gm;
    }

    static double mean(double sum, int n) { return n > 0 ? sum / n : 0.0; }
    static double stddev(double sum, double sq, int n) {
        if (n < 2) return 0.0;
        const double m = sum / n;
        const double var = std::max(0.0, (sq - n * m * m) / (n - 1));
        return std::sqrt(var);
    }
};

std::vector<std::string> ordered_unique(const std::vector<RunRecord>& records,
                                        const std::string RunRecord::*field) {
    std::vector<std::string> out;
    for (const RunRecord& r : records)
        if (std::find(out.begin(), out.end(), r.*field) == out.end())
            out.push_back(r.*field);
    return out;
}

std::vector<double> ordered_ratios(const std::vector<RunRecord>& records) {
    std::vector<double> out;
    for (const RunRecord& r : records)
        if (std::find(out.begin(), out.end(), r.ratio) == out.end())
            out.push_back(r.ratio);
    return out;
}

std::string fixed4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", value);
    return buf;
}

}  // namespace

void write_reports(const std::vector<RunRecord>& records, const std::string& output_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(output_dir);
    const auto path = [&](const std::string& name) {
        return (fs::path(output_dir) / name).string();
    };

    const std::vector<std::string> datasets = ordered_unique(records, &RunRecord::dataset);
    const std::vector<std::string> methods = ordered_unique(records, &RunRecord::method);
    const std::vector<double> ratios = ordered_ratios(records);

    // summary.csv: mean and standard deviation per (dataset, method, ratio).
    std::map<std::tuple<std::string, std::string, double>, GroupStats> groups;
    for (const RunRecord& r : records) groups[{r.dataset, r.method, r.ratio}].add(r);
    {
        std::ofstream out(path("summary.csv"));
        out << "dataset,method,ratio,cells,skipped,acc_mean,acc_std,macc_mean,macc_std,"
               "gm_mean,gm_std\n";
        for (const std::string& d : datasets)
            for (const std::string& m : methods)
                for (double ratio : ratios) {
                    const auto it = groups.find({d, m, ratio});
                    if (it == groups.end()) continue;
                    const GroupStats& g = it->second;
                    out << d << ',' << m << ',' << format_double(ratio) << ',' << g.cells
                        << ',' << g.skipped << ','
                        << format_double(GroupStats::mean(g.acc_sum, g.cells)) << ','
                        << format_double(GroupStats::stddev(g.acc_sum, g.acc_sq, g.cells))
                        << ',' << format_double(GroupStats::mean(g.macc_sum, g.cells))
                        << ','
                        << format_double(GroupStats::stddev(g.macc_sum, g.macc_sq, g.cells))
                        << ',' << format_double(GroupStats::mean(g.gm_sum, g.cells)) << ','
                        << format_double(GroupStats::stddev(g.gm_sum, g.gm_sq, g.cells))
                        << '\n';
                }
    }

    // skipped.txt: the aggregated failure report.
    {
        std::ofstream out(path("skipped.txt"));
        int count = 0;
        for (const RunRecord& r : records)
            if (r.skipped) {
                out << r.dataset << " " << r.method << " ratio=" << format_double(r.ratio)
                    << " repeat=" << r.repeat << " fold=" << r.fold << ": "
                    << r.skip_reason << '\n';
                ++count;
            }
        if (count == 0) out << "no skipped cells\n";
    }

    // Rank tables and Friedman tests per metric and MCAR level.
    std::ofstream friedman(path("friedman.txt"));
    const std::vector<std::pair<std::string, double MetricsReport::*>> metrics_list = {
        {"acc", &MetricsReport::acc}, {"macc", &MetricsReport::macc},
        {"gm", &MetricsReport::gm}};
    for (const auto& [metric_name, field] : metrics_list) {
        for (double ratio : ratios) {
            if (datasets.size() < 2 || methods.size() < 2) {
                friedman << metric_name << " MCAR=" << format_double(ratio)
                         << ": needs >=2 datasets and >=2 methods, skipped\n";
                continue;
            }
            Matrix scores(datasets.size(), methods.size());
            bool complete = true;
            for (std::size_t i = 0; i < datasets.size(); ++i)
                for (std::size_t j = 0; j < methods.size(); ++j) {
                    double sum = 0.0;
                    int n = 0;
                    for (const RunRecord& r : records) {
                        if (r.skipped || r.dataset != datasets[i] ||
                            r.method != methods[j] || r.ratio != ratio)
                            continue;
                        sum += r.report.*field;
                        ++n;
                    }
                    if (n == 0) complete = false;
                    else scores(i, j) = sum / n;
                }
            if (!complete) {
                friedman << metric_name << " MCAR=" << format_double(ratio)
                         << ": incomplete score matrix (skipped cells), test skipped\n";
                continue;
            }

            const RankTable table = mean_ranks(datasets, methods, scores, true);
            {
                std::ofstream out(path("ranks_" + metric_name + "_" +
                                       format_double(ratio) + ".csv"));
                out << "dataset";
                for (const std::string& m : methods) out << ',' << m;
                out << '\n';
                for (std::size_t i = 0; i < datasets.size(); ++i) {
                    out << datasets[i];
                    for (std::size_t j = 0; j < methods.size(); ++j)
                        out << ',' << format_double(table.ranks(i, j));
                    out << '\n';
                }
                out << "mean_rank";
                for (double r : table.mean_ranks) out << ',' << format_double(r);
                out << '\n';
            }

            friedman << "== " << metric_name << " at MCAR=" << format_double(ratio)
                     << " ==\n";
            for (std::size_t j = 0; j < methods.size(); ++j)
                friedman << "  " << methods[j] << ": mean rank "
                         << fixed4(table.mean_ranks[j]) << '\n';
            if (methods.size() >= 3 && datasets.size() >= 2) {
                const FriedmanResult fr = friedman_test(table, 0.05);
                friedman << "  Friedman chi2 = " << fixed4(fr.chi2)
                         << ", Iman-Davenport F = "
                         << (fr.degenerate ? "inf" : fixed4(fr.f_value))
                         << ", F(0.05; " << fr.df1 << ", " << fr.df2
                         << ") = " << fixed4(fr.critical_f)
                         << ", reject H0: " << (fr.reject ? "yes" : "no") << '\n';
            } else {
                friedman << "  Friedman test needs >= 3 methods, skipped\n";
            }
        }
    }
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    namespace fs = std::filesystem;

    std::vector<NamedDataset> datasets;
    datasets.reserve(config.datasets.size());
    for (const DatasetSource& source : config.datasets) {
        NamedDataset named{source.name, load_source(source, config.base_seed)};
        named.data.validate();
        datasets.push_back(std::move(named));
    }

    struct CellSpec {
        std::size_t dataset_index;
        std::size_t method_index;
        double ratio;
        int repeat;
        int fold;
    };
    std::vector<CellSpec> cells;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (std::size_t m = 0; m < config.methods.size(); ++m)
            for (double ratio : config.ratios)
                for (int repeat = 0; repeat < config.repeats; ++repeat)
                    for (int fold = 0; fold < config.folds; ++fold)
                        cells.push_back({d, m, ratio, repeat, fold});

    ExperimentOutput output;
    output.records.resize(cells.size());

    int workers = config.workers > 0
                      ? config.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(cells.size()));

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t index = next.fetch_add(1);
            if (index >= cells.size()) return;
            const CellSpec& cell = cells[index];
            output.records[index] =
                run_cell(datasets[cell.dataset_index], config.methods[cell.method_index],
                         cell.ratio, cell.repeat, cell.fold, config);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    fs::create_directories(config.output_dir);
    {
        std::ofstream out(fs::path(config.output_dir) / "cells.csv");
        out << cells_csv_header() << '\n';
        for (const RunRecord& r : output.records) out << record_to_csv_row(r) << '\n';
    }
    write_reports(output.records, config.output_dir);
    return output;
}

}  // namespace s3ovs
