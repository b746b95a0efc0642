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
#include <numeric>

#include <Eigen/QR>

#include "grndiag/methods.hpp"

namespace grndiag {

namespace {

// Residual sum of squares of the least-squares fit of y on the columns of
// `design` (both already centred, so the intercept is implicit).
double residual_sum_of_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    if (design.cols() == 0) return y.squaredNorm();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::VectorXd beta = qr.solve(y);
    return (y - design * beta).squaredNorm();
}

double bic(double rss, double n, int coefficients) {
    return n * std::log(rss / n) + coefficients * std::log(n);
}

}  // namespace

std::vector<int> variance_order(const ExpressionMatrix& X) {
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    const Eigen::VectorXd var = centered.colwise().squaredNorm().transpose();
    std::vector<int> order(static_cast<std::size_t>(X.cols()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return var(a) < var(b); });
    return order;
}

ScoreMatrix ges_scores(const ExpressionMatrix& X, const GesOptions& opts) {
    if (X.rows() < 10) throw Error("ges_scores: need at least 10 cells");
    const Eigen::Index p = X.cols();
    const auto n = static_cast<double>(X.rows());
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    const std::vector<int> order = variance_order(X);

    ScoreMatrix out;
    out.S = Eigen::MatrixXd::Zero(p, p);
    out.symmetric = false;
    out.method_name = "ges";

    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const int target = order[rank];
        const Eigen::VectorXd y = centered.col(target);
        const double rss_empty = y.squaredNorm();
        if (rss_empty <= 0.0) continue;
        // Keeps ln(RSS) finite when a candidate reproduces the target exactly.
        const double rss_floor = rss_empty * 1e-12;

        std::vector<int> candidates(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rank));
        std::vector<int> parents;
        double current = bic(rss_empty, n, 1);
        while (static_cast<int>(parents.size()) < opts.max_parents && !candidates.empty()) {
            Eigen::MatrixXd design(X.rows(), static_cast<Eigen::Index>(parents.size() + 1));
            for (std::size_t k = 0; k < parents.size(); ++k) design.col(static_cast<Eigen::Index>(k)) = centered.col(parents[k]);

            double best_gain = 0.0;
            std::size_t best = candidates.size();
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                design.col(design.cols() - 1) = centered.col(candidates[c]);
                const double rss = std::max(residual_sum_of_squares(design, y), rss_floor);
                const double gain = current - bic(rss, n, static_cast<int>(parents.size()) + 2);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;
                }
            }
            if (best == candidates.size()) break;
            const int parent = candidates[best];
            out.S(parent, target) = best_gain;
            parents.push_back(parent);
            candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
            current -= best_gain;
        }
    }
    return out;
}

}  // namespace grndiag
