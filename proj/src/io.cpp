#include "dmslda/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dmslda/csl/session.hpp"

namespace dmslda {

Matrix load_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error(path + ": ragged CSV row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(path + ": empty CSV");
    Matrix m(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

LabeledDataset load_labeled_csv(const std::string& path) {
    Matrix raw = load_csv_matrix(path);
    if (raw.cols() < 2) throw Error(path + ": need at least one feature column plus labels");
    LabeledDataset data;
    data.features = raw.leftCols(raw.cols() - 1);
    data.labels.resize(raw.rows());
    int max_label = 0;
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        double v = raw(i, raw.cols() - 1);
        int label = static_cast<int>(std::lround(v));
        if (std::abs(v - label) > 1e-9 || label < 1)
            throw Error(path + ": labels must be positive integers");
        data.labels[i] = label;
        max_label = std::max(max_label, label);
    }
    data.num_classes = max_label;
    return data;
}

void save_labeled_csv(const LabeledDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    char buf[40];
    for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.features(i, j));
            out << buf << ',';
        }
        out << data.labels[i] << '\n';
    }
}

void save_model(const ReducedLdaModel& model, int chosen_round, const std::string& path) {
    std::vector<uint8_t> body = serialize_message(final_model_message(model, chosen_round));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(body.data()),
              static_cast<std::streamsize>(body.size()));
}

ReducedLdaModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::vector<uint8_t> body((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    return model_from_final_message(parse_message(body));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

}  // namespace dmslda
