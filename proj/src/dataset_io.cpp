/*
 * Copyright 2026 The grndiag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "grndiag/simulator.hpp"

namespace grndiag {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix) {
    return std::filesystem::path(stem.string() + suffix);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

void write_dataset_table(const Dataset& data, const std::filesystem::path& stem) {
    const auto table_path = with_suffix(stem, ".csv");
    const auto edges_path = with_suffix(stem, "_edges.csv");
    std::ofstream table(table_path);
    if (!table) throw Error("cannot write " + table_path.string());
    table << std::setprecision(17);
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) table << (j ? "," : "") << 'g' << j;
    table << '\n';
    for (Eigen::Index c = 0; c < data.X.rows(); ++c) {
        for (Eigen::Index j = 0; j < data.X.cols(); ++j) table << (j ? "," : "") << data.X(c, j);
        table << '\n';
    }

    std::ofstream edges(edges_path);
    if (!edges) throw Error("cannot write " + edges_path.string());
    edges << std::setprecision(17) << "i,j,weight\n";
    const auto& w = data.truth.acyclic_weights;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (w(i, j) != 0.0) edges << i << ',' << j << ',' << w(i, j) << '\n';
        }
    }
}

DatasetTable read_dataset_table(const std::filesystem::path& stem) {
    const auto table_path = with_suffix(stem, ".csv");
    const auto edges_path = with_suffix(stem, "_edges.csv");
    std::ifstream table(table_path);
    if (!table) throw Error("cannot read " + table_path.string());

    std::string line;
    std::getline(table, line);
    const auto p = static_cast<Eigen::Index>(split_line(line).size());
    std::vector<std::vector<double>> rows;
    while (std::getline(table, line)) {
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (static_cast<Eigen::Index>(fields.size()) != p) throw Error("ragged row in " + table_path.string());
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(std::stod(f));
        rows.push_back(std::move(row));
    }

    DatasetTable out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), p);
    for (std::size_t c = 0; c < rows.size(); ++c) {
        for (Eigen::Index j = 0; j < p; ++j) out.X(static_cast<Eigen::Index>(c), j) = rows[c][static_cast<std::size_t>(j)];
    }

    std::ifstream edges(edges_path);
    if (!edges) throw Error("cannot read " + edges_path.string());
    out.weights = WeightMatrix::Zero(p, p);
    std::getline(edges, line);
    while (std::getline(edges, line)) {
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 3) throw Error("malformed edge row in " + edges_path.string());
        out.weights(std::stol(f[0]), std::stol(f[1])) = std::stod(f[2]);
    }
    return out;
}

}  // namespace grndiag
