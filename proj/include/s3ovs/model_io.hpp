#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "s3ovs/s3vm.hpp"
#include "s3ovs/svm.hpp"

namespace s3ovs {

// Versioned flat text model files. A file holds one of: a plain SVM, an
// S3VM result (model plus committed labels and objective trace), or an
// ensemble of S3VM results.
using AnyModel = std::variant<SvmModel, S3vmResult, EnsembleModel>;

void save_model(std::ostream& out, const SvmModel& model);
void save_model(std::ostream& out, const S3vmResult& result);
void save_model(std::ostream& out, const EnsembleModel& ensemble);
void save_model_file(const std::string& path, const AnyModel& model);

AnyModel load_model_file(const std::string& path);

// Predict with whichever model type the file held.
std::vector<int> predict_any(const AnyModel& model, const Matrix& x);

}  // namespace s3ovs
