#pragma once

#include <map>
#include <string>
#include <vector>

#include "s3ovs/dataset.hpp"

namespace s3ovs {

// Raw CSV contents before numeric conversion; nominal columns are expanded
// at this level, then the table is converted to a Dataset.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;  // throws if absent
};

Table load_table(const std::string& path);

// Replaces each named column holding categorical tokens with one indicator
// column per distinct value (values sorted, column named "col=value").
Table one_hot_encode(const Table& table, const std::vector<std::string>& nominal_columns);

// Maps label tokens to {-1, +1}. Default passes "-1"/"1"/"+1" through.
struct LabelMap {
    std::map<std::string, int> mapping = {{"-1", -1}, {"1", +1}, {"+1", +1}};

    int apply(const std::string& token) const;  // throws on unknown token
};

Dataset table_to_dataset(const Table& table, const std::string& label_column,
                         const LabelMap& label_map = {});

Dataset load_csv(const std::string& path, const std::string& label_column = "label",
                 const LabelMap& label_map = {});

// Header f1,...,fd,label; doubles in shortest round-trip form.
void write_dataset_csv(const std::string& path, const Dataset& dataset);

// Reads only the f* feature columns; label and lineage columns are ignored.
// Used for unlabeled inputs such as over-sampler output.
Matrix load_features_csv(const std::string& path);

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace s3ovs
