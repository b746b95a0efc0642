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
#include "stats.hpp"

namespace grndiag {

Eigen::MatrixXd correlation_matrix(const ExpressionMatrix& X) {
    const Eigen::Index p = X.cols();
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered;
    Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    for (Eigen::Index j = 0; j < p; ++j) {
        // The centred sum of a constant column need not round to exactly zero.
        if ((X.col(j).array() == X(0, j)).all()) sd(j) = 0.0;
    }
    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            if (sd(i) == 0.0 || sd(j) == 0.0) continue;
            const double r = std::clamp(cov(i, j) / (sd(i) * sd(j)), -1.0, 1.0);
            corr(i, j) = r;
            corr(j, i) = r;
        }
        corr(j, j) = sd(j) == 0.0 ? 0.0 : 1.0;
    }
    return corr;
}

ScoreMatrix pearson_scores(const ExpressionMatrix& X) {
    if (X.rows() < 3) throw Error("pearson_scores: need at least 3 cells");
    ScoreMatrix out;
    out.S = correlation_matrix(X).cwiseAbs();
    out.S.diagonal().setZero();
    out.symmetric = true;
    out.method_name = "pearson";
    return out;
}

}  // namespace grndiag
