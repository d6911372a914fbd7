#include "s3ovs/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace s3ovs {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
            cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_number(const std::string& token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && !token.empty();
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

std::size_t Table::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw std::runtime_error("column not found: " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

Table load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    Table table;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty file: " + path);
    table.columns = split_line(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (cells.size() != table.columns.size())
            throw std::runtime_error(path + ": row " + std::to_string(line_no) +
                                     " has " + std::to_string(cells.size()) +
                                     " cells, expected " +
                                     std::to_string(table.columns.size()));
        table.rows.push_back(std::move(cells));
    }
    return table;
}

Table one_hot_encode(const Table& table, const std::vector<std::string>& nominal_columns) {
    std::vector<bool> is_nominal(table.columns.size(), false);
    for (const std::string& name : nominal_columns) {
        const std::size_t idx = table.column_index(name);
        double ignored;
        bool all_numeric = !table.rows.empty();
        for (const auto& row : table.rows)
            if (!parse_number(row[idx], ignored)) {
                all_numeric = false;
                break;
            }
        if (all_numeric)
            throw std::runtime_error("one_hot_encode: column already numeric: " + name);
        is_nominal[idx] = true;
    }

    Table out;
    std::vector<std::vector<std::string>> values_of(table.columns.size());
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (!is_nominal[j]) {
            out.columns.push_back(table.columns[j]);
            continue;
        }
        std::set<std::string> distinct;
        for (const auto& row : table.rows) distinct.insert(row[j]);
        values_of[j].assign(distinct.begin(), distinct.end());
        for (const std::string& v : values_of[j])
            out.columns.push_back(table.columns[j] + "=" + v);
    }

    out.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        std::vector<std::string> cells;
        cells.reserve(out.columns.size());
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (!is_nominal[j]) {
                cells.push_back(row[j]);
                continue;
            }
            for (const std::string& v : values_of[j])
                cells.push_back(row[j] == v ? "1" : "0");
        }
        out.rows.push_back(std::move(cells));
    }
    return out;
}

int LabelMap::apply(const std::string& token) const {
    const auto it = mapping.find(token);
    if (it == mapping.end())
        throw std::runtime_error("unknown label value: '" + token + "'");
    return it->second;
}

Dataset table_to_dataset(const Table& table, const std::string& label_column,
                         const LabelMap& label_map) {
    const std::size_t label_idx = table.column_index(label_column);
    Dataset out;
    out.features = Matrix(0, table.columns.size() - 1);
    for (std::size_t j = 0; j < table.columns.size(); ++j)
        if (j != label_idx) out.feature_names.push_back(table.columns[j]);

    std::vector<double> row(table.columns.size() - 1);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        std::size_t dst = 0;
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (j == label_idx) continue;
            if (!parse_number(table.rows[i][j], row[dst]))
                throw std::runtime_error("non-numeric cell at row " +
                                         std::to_string(i + 2) + ", column '" +
                                         table.columns[j] + "'");
            ++dst;
        }
        const int label = label_map.apply(table.rows[i][label_idx]);
        out.append_pattern(row, label, static_cast<std::int64_t>(i));
    }
    if (out.size() == 0) throw std::runtime_error("dataset has no rows");
    if (out.count_label(+1) == 0 || out.count_label(-1) == 0)
        throw std::runtime_error("dataset has fewer than 2 classes");
    return out;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const LabelMap& label_map) {
    return table_to_dataset(load_table(path), label_column, label_map);
}

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (std::size_t j = 0; j < dataset.dim(); ++j) {
        if (j < dataset.feature_names.size() && !dataset.feature_names[j].empty())
            out << dataset.feature_names[j];
        else
            out << "f" << (j + 1);
        out << ',';
    }
    out << "label\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (double v : dataset.features.row(i)) out << format_double(v) << ',';
        out << dataset.labels[i] << '\n';
    }
}

Matrix load_features_csv(const std::string& path) {
    const Table table = load_table(path);
    std::vector<std::size_t> feature_cols;
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        const std::string& name = table.columns[j];
        if (name.size() >= 2 && name[0] == 'f' &&
            std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            feature_cols.push_back(j);
    }
    if (feature_cols.empty())
        throw std::runtime_error(path + ": no f* feature columns found");
    Matrix m(0, feature_cols.size());
    std::vector<double> row(feature_cols.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t c = 0; c < feature_cols.size(); ++c)
            if (!parse_number(table.rows[i][feature_cols[c]], row[c]))
                throw std::runtime_error("non-numeric cell at row " +
                                         std::to_string(i + 2) + ", column '" +
                                         table.columns[feature_cols[c]] + "'");
        m.append_row(row);
    }
    return m;
}

}  // namespace s3ovs
