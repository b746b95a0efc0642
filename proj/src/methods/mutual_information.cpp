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

#include <algorithm>
#include <cmath>

#include "grndiag/methods.hpp"

namespace grndiag {

std::vector<int> equal_frequency_bins(const Eigen::VectorXd& column, int bins) {
    const auto n = static_cast<std::size_t>(column.size());
    if (bins < 1) throw Error("equal_frequency_bins: need at least one bin");
    if (n == 0) return {};

    std::vector<double> sorted(column.data(), column.data() + n);
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(bins));
    for (int k = 1; k < bins; ++k) {
        const double h = static_cast<double>(n - 1) * k / bins;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double frac = h - static_cast<double>(lo);
        const double edge = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
        // Tied mass (dropout zeros) collapses neighbouring cut points.
        if (edges.empty() || edge != edges.back()) edges.push_back(edge);
    }

    std::vector<int> labels(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), column(static_cast<Eigen::Index>(c)));
        labels[c] = static_cast<int>(it - edges.begin());
    }
    return labels;
}

double discrete_mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw Error("discrete_mutual_information: length mismatch");
    if (a.empty()) return 0.0;
    const int ka = *std::max_element(a.begin(), a.end()) + 1;
    const int kb = *std::max_element(b.begin(), b.end()) + 1;
    std::vector<double> joint(static_cast<std::size_t>(ka * kb), 0.0);
    std::vector<double> ma(static_cast<std::size_t>(ka), 0.0);
    std::vector<double> mb(static_cast<std::size_t>(kb), 0.0);
    for (std::size_t c = 0; c < a.size(); ++c) {
        joint[static_cast<std::size_t>(a[c] * kb + b[c])] += 1.0;
        ma[static_cast<std::size_t>(a[c])] += 1.0;
        mb[static_cast<std::size_t>(b[c])] += 1.0;
    }
    const auto n = static_cast<double>(a.size());
    double mi = 0.0;
    for (int x = 0; x < ka; ++x) {
        for (int y = 0; y < kb; ++y) {
            const double c = joint[static_cast<std::size_t>(x * kb + y)];
            if (c == 0.0) continue;
            mi += c / n * std::log(c * n / (ma[static_cast<std::size_t>(x)] * mb[static_cast<std::size_t>(y)]));
        }
    }
    return std::max(mi, 0.0);
}

ScoreMatrix mi_scores(const ExpressionMatrix& X, int bins) {
    if (X.rows() < bins) throw Error("mi_scores: fewer cells than bins");
    const Eigen::Index p = X.cols();
    std::vector<std::vector<int>> labels(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) labels[static_cast<std::size_t>(j)] = equal_frequency_bins(X.col(j), bins);

    ScoreMatrix out;
    out.S = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double mi = discrete_mutual_information(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]);
            out.S(i, j) = mi;
            out.S(j, i) = mi;
        }
    }
    out.symmetric = true;
    out.method_name = "mi";
    return out;
}

}  // namespace grndiag
