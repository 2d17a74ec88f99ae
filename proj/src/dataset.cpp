#include "gramml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace gramml::ml {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_numeric(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + s.size();
}

} // namespace

bool Dataset::has_missing() const {
    for (double v : features.data)
        if (std::isnan(v)) return true;
    return false;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.class_names = class_names;
    out.feature_names = feature_names;
    out.features = Matrix(indices.size(), features.cols);
    out.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const double* src = features.row(indices[i]);
        std::copy(src, src + features.cols, out.features.row(i));
        out.labels.push_back(labels[indices[i]]);
    }
    return out;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& missing_token) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("dataset has no header row: " + path);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) label_idx = i;
    if (label_idx == header.size())
        throw std::runtime_error("label column '" + label_column + "' not found in " + path);

    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        for (auto& f : fields) f = trim(f);
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw std::runtime_error("dataset is empty: " + path);

    // Column typing: numeric iff every non-missing cell parses as a number.
    const std::size_t n_cols = header.size();
    std::vector<bool> numeric(n_cols, true);
    for (std::size_t j = 0; j < n_cols; ++j) {
        if (j == label_idx) continue;
        for (const auto& row : rows) {
            double v;
            if (row[j] != missing_token && !parse_numeric(row[j], v)) {
                numeric[j] = false;
                break;
            }
        }
    }

    // Category tables for one-hot columns, lexicographic order.
    std::vector<std::vector<std::string>> categories(n_cols);
    for (std::size_t j = 0; j < n_cols; ++j) {
        if (j == label_idx || numeric[j]) continue;
        std::set<std::string> values;
        for (const auto& row : rows)
            if (row[j] != missing_token) values.insert(row[j]);
        categories[j].assign(values.begin(), values.end());
    }

    Dataset ds;
    {
        std::set<std::string> classes;
        for (const auto& row : rows) {
            if (row[label_idx] == missing_token)
                throw std::runtime_error(path + ": missing value in label column");
            classes.insert(row[label_idx]);
        }
        ds.class_names.assign(classes.begin(), classes.end());
        if (ds.class_names.size() < 2)
            throw std::runtime_error(path + ": dataset has a single class");
    }

    for (std::size_t j = 0; j < n_cols; ++j) {
        if (j == label_idx) continue;
        if (numeric[j]) {
            ds.feature_names.push_back(header[j]);
        } else {
            for (const auto& cat : categories[j])
                ds.feature_names.push_back(header[j] + "=" + cat);
        }
    }

    ds.features = Matrix(rows.size(), ds.feature_names.size());
    ds.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double* out = ds.features.row(i);
        std::size_t k = 0;
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (j == label_idx) continue;
            const std::string& cell = rows[i][j];
            if (numeric[j]) {
                if (cell == missing_token) {
                    out[k++] = kNaN;
                } else {
                    double v;
                    parse_numeric(cell, v);
                    out[k++] = v;
                }
            } else {
                for (const auto& cat : categories[j]) {
                    if (cell == missing_token) out[k++] = kNaN;
                    else out[k++] = cell == cat ? 1.0 : 0.0;
                }
            }
        }
        const std::string& label = rows[i][label_idx];
        auto it = std::lower_bound(ds.class_names.begin(), ds.class_names.end(), label);
        ds.labels.push_back(static_cast<int>(it - ds.class_names.begin()));
    }
    return ds;
}

void write_csv(const Dataset& ds, const std::string& path, const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    for (const auto& name : ds.feature_names) out << name << ',';
    out << label_column << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double* row = ds.features.row(i);
        for (std::size_t j = 0; j < ds.features.cols; ++j) {
            if (std::isnan(row[j])) out << '?';
            else out << row[j];
            out << ',';
        }
        out << ds.class_names[static_cast<std::size_t>(ds.labels[i])] << '\n';
    }
}

} // namespace gramml::ml
