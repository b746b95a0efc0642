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

#include <Eigen/LU>

#include "grndiag/methods.hpp"
#include "stats.hpp"

namespace grndiag {

namespace {

constexpr double kCorrelationClamp = 1.0 - 1e-7;

// Calls visit(subset) for every size-k subset of `pool` in lexicographic
// order; stops early when visit returns true.
template <typename Visit>
bool for_each_subset(const std::vector<int>& pool, int k, Visit&& visit) {
    const auto n = static_cast<int>(pool.size());
    if (k > n) return false;
    std::vector<int> pick(static_cast<std::size_t>(k));
    std::vector<int> subset(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
        if (visit(subset)) return true;
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return false;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace

double fisher_z(double r, int n, int cond_size) {
    const double clamped = std::clamp(r, -kCorrelationClamp, kCorrelationClamp);
    const double dof = static_cast<double>(n - cond_size - 3);
    if (dof <= 0.0) return 0.0;
    return 0.5 * std::log((1.0 + clamped) / (1.0 - clamped)) * std::sqrt(dof);
}

double fisher_z_pvalue(double r, int n, int cond_size) {
    const double z = std::abs(fisher_z(r, n, cond_size));
    return std::erfc(z / std::sqrt(2.0));
}

double partial_correlation(const Eigen::MatrixXd& corr, int i, int j, const std::vector<int>& cond) {
    if (cond.empty()) return corr(i, j);
    std::vector<int> idx{i, j};
    idx.insert(idx.end(), cond.begin(), cond.end());
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = corr(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible()) {
        // Collinear conditioning set: report full dependence so the edge stays.
        return corr(i, j) >= 0.0 ? 1.0 : -1.0;
    }
    const Eigen::MatrixXd prec = lu.inverse();
    const double denom = std::sqrt(prec(0, 0) * prec(1, 1));
    if (!(denom > 0.0)) return corr(i, j) >= 0.0 ? 1.0 : -1.0;
    return std::clamp(-prec(0, 1) / denom, -1.0, 1.0);
}

ScoreMatrix pc_scores(const ExpressionMatrix& X, const PcOptions& opts) {
    if (X.rows() < 10) throw Error("pc_scores: need at least 10 cells");
    const auto n = static_cast<int>(X.rows());
    const auto p = static_cast<int>(X.cols());
    const Eigen::MatrixXd corr = correlation_matrix(X);

    AdjacencyMatrix adj = AdjacencyMatrix::Constant(p, p, true);
    adj.diagonal().setConstant(false);

    for (int level = 0; level <= opts.max_cond; ++level) {
        // PC-stable: neighbour sets are frozen for the whole level.
        const AdjacencyMatrix frozen = adj;
        bool any_testable = false;
        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                if (!adj(i, j)) continue;
                bool removed = false;
                for (int side = 0; side < 2 && !removed; ++side) {
                    const int a = side == 0 ? i : j;
                    const int b = side == 0 ? j : i;
                    std::vector<int> pool;
                    for (int v = 0; v < p; ++v) {
                        if (v != b && frozen(a, v)) pool.push_back(v);
                    }
                    if (static_cast<int>(pool.size()) < level) continue;
                    any_testable = true;
                    removed = for_each_subset(pool, level, [&](const std::vector<int>& cond) {
                        const double r = partial_correlation(corr, i, j, cond);
                        return fisher_z_pvalue(r, n, level) > opts.alpha;
                    });
                }
                if (removed) {
                    adj(i, j) = false;
                    adj(j, i) = false;
                }
            }
        }
        if (!any_testable) break;
    }

    ScoreMatrix out;
    out.S = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (adj(i, j)) out.S(i, j) = std::abs(corr(i, j));
        }
    }
    out.symmetric = true;
    out.method_name = "pc";
    return out;
}

}  // namespace grndiag
