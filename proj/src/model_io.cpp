#include "s3ovs/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "s3ovs/csv.hpp"

namespace s3ovs {

namespace {

constexpr const char* kMagic = "s3ovs-model v1";

void write_svm_body(std::ostream& out, const SvmModel& model) {
    out << "kernel " << kernel_to_string(model.kernel) << '\n';
    out << "bias " << format_double(model.bias) << '\n';
    out << "converged " << (model.converged ? 1 : 0) << '\n';
    out << "sv " << model.support_count() << ' ' << model.support_vectors.cols() << '\n';
    for (std::size_t i = 0; i < model.support_count(); ++i) {
        out << format_double(model.dual_coefs[i]) << ' '
            << format_double(model.sv_costs[i]);
        for (double v : model.support_vectors.row(i)) out << ' ' << format_double(v);
        out << '\n';
    }
}

void write_s3vm_body(std::ostream& out, const S3vmResult& result) {
    write_svm_body(out, result.model);
    out << "ystar " << result.synthetic_labels.size();
    for (int y : result.synthetic_labels) out << ' ' << y;
    out << '\n';
    out << "switches " << result.switch_count << '\n';
    out << "objective " << format_double(result.final_objective) << '\n';
    out << "trace " << result.stages.size() << '\n';
    for (const S3vmStage& stage : result.stages) {
        out << "stage " << format_double(stage.unlabeled_cost) << ' ' << stage.switches
            << ' ' << stage.objectives.size();
        for (double obj : stage.objectives) out << ' ' << format_double(obj);
        out << '\n';
    }
}

std::string expect_key(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("model file: unexpected end, wanted '" + key + "'");
    if (line.rfind(key + " ", 0) != 0 && line != key)
        throw std::runtime_error("model file: expected '" + key + "', got '" + line + "'");
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string{};
}

SvmModel read_svm_body(std::istream& in) {
    SvmModel model;
    model.kernel = kernel_from_string(expect_key(in, "kernel"));
    model.bias = std::stod(expect_key(in, "bias"));
    model.converged = std::stoi(expect_key(in, "converged")) != 0;
    std::istringstream sv_header(expect_key(in, "sv"));
    std::size_t count = 0, dim = 0;
    if (!(sv_header >> count >> dim))
        throw std::runtime_error("model file: bad sv header");
    model.support_vectors = Matrix(0, dim);
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < count; ++i) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("model file: truncated support vectors");
        std::istringstream ls(line);
        double coef = 0.0, cost = 0.0;
        if (!(ls >> coef >> cost))
            throw std::runtime_error("model file: bad support vector row");
        for (double& v : row)
            if (!(ls >> v)) throw std::runtime_error("model file: bad support vector row");
        model.dual_coefs.push_back(coef);
        model.sv_costs.push_back(cost);
        model.support_vectors.append_row(row);
    }
    return model;
}

S3vmResult read_s3vm_body(std::istream& in) {
    S3vmResult result;
    result.model = read_svm_body(in);
    std::istringstream ystar(expect_key(in, "ystar"));
    std::size_t m = 0;
    ystar >> m;
    result.synthetic_labels.resize(m);
    for (int& y : result.synthetic_labels)
        if (!(ystar >> y)) throw std::runtime_error("model file: bad ystar row");
    result.switch_count = std::stoi(expect_key(in, "switches"));
    result.final_objective = std::stod(expect_key(in, "objective"));
    const std::size_t stage_count = std::stoul(expect_key(in, "trace"));
    for (std::size_t s = 0; s < stage_count; ++s) {
        std::istringstream line(expect_key(in, "stage"));
        S3vmStage stage;
        std::size_t obj_count = 0;
        if (!(line >> stage.unlabeled_cost >> stage.switches >> obj_count))
            throw std::runtime_error("model file: bad stage row");
        stage.objectives.resize(obj_count);
        for (double& obj : stage.objectives)
            if (!(line >> obj)) throw std::runtime_error("model file: bad stage row");
        result.stages.push_back(std::move(stage));
    }
    return result;
}

}  // namespace

void save_model(std::ostream& out, const SvmModel& model) {
    out << kMagic << "\ntype svm\n";
    write_svm_body(out, model);
    out << "end\n";
}

void save_model(std::ostream& out, const S3vmResult& result) {
    out << kMagic << "\ntype s3vm\n";
    write_s3vm_body(out, result);
    out << "end\n";
}

void save_model(std::ostream& out, const EnsembleModel& ensemble) {
    out << kMagic << "\ntype ensemble\nmembers " << ensemble.members.size() << '\n';
    for (const EnsembleMember& member : ensemble.members) {
        out << "member " << member.seed << '\n';
        write_s3vm_body(out, member.result);
    }
    out << "end\n";
}

void save_model_file(const std::string& path, const AnyModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    std::visit([&](const auto& m) { save_model(out, m); }, model);
}

AnyModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw std::runtime_error(path + ": not a s3ovs model file");
    const std::string type = expect_key(in, "type");
    if (type == "svm") return read_svm_body(in);
    if (type == "s3vm") return read_s3vm_body(in);
    if (type == "ensemble") {
        EnsembleModel ensemble;
        const std::size_t count = std::stoul(expect_key(in, "members"));
        for (std::size_t i = 0; i < count; ++i) {
            EnsembleMember member;
            member.seed = std::stoull(expect_key(in, "member"));
            member.result = read_s3vm_body(in);
            ensemble.members.push_back(std::move(member));
        }
        return ensemble;
    }
    throw std::runtime_error(path + ": unknown model type '" + type + "'");
}

std::vector<int> predict_any(const AnyModel& model, const Matrix& x) {
    if (const auto* svm = std::get_if<SvmModel>(&model)) return predict(*svm, x);
    if (const auto* s3vm = std::get_if<S3vmResult>(&model))
        return predict(s3vm->model, x);
    return ensemble_predict(std::get<EnsembleModel>(model), x);
}

}  // namespace s3ovs
