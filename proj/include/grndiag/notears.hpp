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

#include "grndiag/core.hpp"
#include "grndiag/methods.hpp"

namespace grndiag::notears {

/// h(W) = tr(exp(W o W)) - p; zero iff the support of W is acyclic.
/// Writes (exp(W o W))^T o 2W into `grad` when given.
double acyclicity(const WeightMatrix& W, WeightMatrix* grad = nullptr);

/// Augmented Lagrangian of the penalised least-squares problem:
///   (1/2n)||X - XW||_F^2 + l1 ||W||_1 + (c/2) h(W)^2 + mu h(W).
/// The data enter only through the Gram matrix X^T X / n of centred X.
struct AugmentedLagrangian {
    Eigen::MatrixXd gram;
    double l1 = 0.05;
    double c = 1.0;
    double mu = 0.0;

    static AugmentedLagrangian from_data(const ExpressionMatrix& X);

    double loss(const WeightMatrix& W, WeightMatrix* grad = nullptr) const;
    /// Value at W; the gradient uses sign(W) for the l1 term, so it is the
    /// true gradient wherever no off-diagonal entry of W is zero.
    double value(const WeightMatrix& W, WeightMatrix* grad = nullptr) const;
    /// Smooth reformulation over x = [W+, W-] >= 0 with W = W+ - W-.
    double split_value(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;
};

struct Solution {
    WeightMatrix W;  ///< before thresholding
    double h = 0.0;
    double c = 0.0;
    int outer_iterations = 0;
    bool converged = false;
};

Solution solve(const ExpressionMatrix& X, const NotearsOptions& opts = {});

}  // namespace grndiag::notears
