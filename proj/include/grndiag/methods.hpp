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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "grndiag/core.hpp"

namespace grndiag {

/// p x p edge scores; S(i, j) is the evidence for i -> j. Nonnegative and
/// finite, zero diagonal, exactly symmetric when `symmetric` is set.
struct ScoreMatrix {
    Eigen::MatrixXd S;
    bool symmetric = false;
    std::string method_name;
    /// Only NOTEARS can fail to converge; every other method leaves it set.
    bool converged = true;

    /// Throws Error describing the first violated invariant.
    void check_invariants() const;
};

enum class Method { pearson, mi, genie3, pc, ges, notears };

inline constexpr std::array<Method, 6> kAllMethods = {Method::pearson, Method::mi,  Method::genie3,
                                                      Method::pc,      Method::ges, Method::notears};

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// |corr(X_i, X_j)|; constant columns score 0 against everything.
ScoreMatrix pearson_scores(const ExpressionMatrix& X);

/// Bin labels for equal-frequency discretisation: cut points are the
/// empirical quantiles at k/bins (linear interpolation), duplicate cut points
/// are merged, and a value's bin is the number of cut points <= value.
std::vector<int> equal_frequency_bins(const Eigen::VectorXd& column, int bins);

/// Plug-in mutual information in nats between two discretised columns.
double discrete_mutual_information(const std::vector<int>& a, const std::vector<int>& b);

ScoreMatrix mi_scores(const ExpressionMatrix& X, int bins = 6);

struct ForestOptions {
    int trees = 50;
    int min_samples_split = 2;
};

/// Random-forest (variance reduction, bootstrap, all features per split,
/// unlimited depth) importances of every column for predicting `target`.
/// Entry `target` is zero; the rest sum to one unless no split was possible.
Eigen::VectorXd genie3_target_importances(const ExpressionMatrix& X, int target, const ForestOptions& opts,
                                          Rng& rng);

/// Each target j draws from its own stream keyed by (seed, j).
ScoreMatrix genie3_scores(const ExpressionMatrix& X, std::uint64_t seed, const ForestOptions& opts = {});

struct PcOptions {
    double alpha = 0.05;
    int max_cond = 2;
};

/// Fisher-z statistic of a (partial) correlation `r` with conditioning-set
/// size `cond_size`; |r| is clamped to 1 - 1e-7 first.
double fisher_z(double r, int n, int cond_size);
/// Two-sided p-value of the Fisher-z test.
double fisher_z_pvalue(double r, int n, int cond_size);
/// Partial correlation of (i, j) given `cond` from a correlation matrix.
double partial_correlation(const Eigen::MatrixXd& corr, int i, int j, const std::vector<int>& cond);

/// PC-stable skeleton; surviving edges are weighted by |marginal corr|.
ScoreMatrix pc_scores(const ExpressionMatrix& X, const PcOptions& opts = {});

struct GesOptions {
    int max_parents = 3;
};

/// Genes sorted by ascending sample variance, ties by index.
std::vector<int> variance_order(const ExpressionMatrix& X);

/// Forward BIC search per target over genes earlier in the variance order.
ScoreMatrix ges_scores(const ExpressionMatrix& X, const GesOptions& opts = {});

struct NotearsOptions {
    double l1 = 0.05;
    double threshold = 0.1;
    int max_outer = 100;
    double h_tol = 1e-8;
    double rho_max = 1e16;
    /// Convergence flag threshold on the final acyclicity value.
    double h_converged = 1e-6;
};

ScoreMatrix notears_scores(const ExpressionMatrix& X, const NotearsOptions& opts = {});

/// Dispatch by method; `seed` is only consumed by genie3.
ScoreMatrix run_method(Method m, const ExpressionMatrix& X, std::uint64_t seed);

}  // namespace grndiag
