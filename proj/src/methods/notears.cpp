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

#include "grndiag/notears.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "grndiag/optim.hpp"

namespace grndiag::notears {

namespace {

WeightMatrix unpack(const Eigen::VectorXd& x, Eigen::Index p) {
    const Eigen::Index d = p * p;
    return Eigen::Map<const WeightMatrix>(x.data(), p, p) - Eigen::Map<const WeightMatrix>(x.data() + d, p, p);
}

}  // namespace

double acyclicity(const WeightMatrix& W, WeightMatrix* grad) {
    const Eigen::Index p = W.rows();
    const WeightMatrix squared = W.cwiseProduct(W);
    const WeightMatrix E = squared.exp();
    if (grad != nullptr) *grad = E.transpose().cwiseProduct(2.0 * W);
    return E.trace() - static_cast<double>(p);
}

AugmentedLagrangian AugmentedLagrangian::from_data(const ExpressionMatrix& X) {
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    AugmentedLagrangian al;
    al.gram = centered.transpose() * centered / static_cast<double>(X.rows());
    return al;
}

double AugmentedLagrangian::loss(const WeightMatrix& W, WeightMatrix* grad) const {
    const Eigen::Index p = W.rows();
    const WeightMatrix M = WeightMatrix::Identity(p, p) - W;
    const WeightMatrix R = gram * M;
    if (grad != nullptr) *grad = -R;
    return 0.5 * M.cwiseProduct(R).sum();
}

double AugmentedLagrangian::value(const WeightMatrix& W, WeightMatrix* grad) const {
    WeightMatrix g_loss;
    WeightMatrix g_h;
    const double ls = loss(W, grad != nullptr ? &g_loss : nullptr);
    const double h = acyclicity(W, grad != nullptr ? &g_h : nullptr);
    if (grad != nullptr) {
        *grad = g_loss + l1 * W.cwiseSign() + (c * h + mu) * g_h;
    }
    return ls + l1 * W.cwiseAbs().sum() + 0.5 * c * h * h + mu * h;
}

double AugmentedLagrangian::split_value(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    const Eigen::Index p = gram.rows();
    const Eigen::Index d = p * p;
    const WeightMatrix W = unpack(x, p);
    WeightMatrix g_loss;
    WeightMatrix g_h;
    const double ls = loss(W, &g_loss);
    const double h = acyclicity(W, &g_h);
    const WeightMatrix smooth = g_loss + (c * h + mu) * g_h;
    grad.resize(2 * d);
    Eigen::Map<WeightMatrix>(grad.data(), p, p) = smooth.array() + l1;
    Eigen::Map<WeightMatrix>(grad.data() + d, p, p) = -smooth.array() + l1;
    return ls + l1 * x.sum() + 0.5 * c * h * h + mu * h;
}

Solution solve(const ExpressionMatrix& X, const NotearsOptions& opts) {
    const Eigen::Index p = X.cols();
    const Eigen::Index d = p * p;
    AugmentedLagrangian al = AugmentedLagrangian::from_data(X);
    al.l1 = opts.l1;

    Eigen::VectorXd lower = Eigen::VectorXd::Zero(2 * d);
    Eigen::VectorXd upper = Eigen::VectorXd::Constant(2 * d, std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < p; ++i) {
        upper(i * p + i) = 0.0;
        upper(d + i * p + i) = 0.0;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * d);
    double h = std::numeric_limits<double>::infinity();
    Solution sol;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        sol.outer_iterations = outer + 1;
        Eigen::VectorXd x_new = x;
        double h_new = h;
        while (al.c < opts.rho_max) {
            const SmoothObjective f = [&al](const Eigen::VectorXd& v, Eigen::VectorXd& g) { return al.split_value(v, g); };
            x_new = minimize_bounded(f, x, lower, upper).x;
            h_new = acyclicity(unpack(x_new, p));
            if (h_new > 0.25 * h) {
                al.c *= 10.0;
            } else {
                break;
            }
        }
        x = x_new;
        h = h_new;
        al.mu += al.c * h;
        if (h <= opts.h_tol || al.c >= opts.rho_max) break;
    }

    sol.W = unpack(x, p);
    sol.h = acyclicity(sol.W);
    sol.c = al.c;
    sol.converged = sol.h <= opts.h_converged;
    return sol;
}

}  // namespace grndiag::notears

namespace grndiag {

ScoreMatrix notears_scores(const ExpressionMatrix& X, const NotearsOptions& opts) {
    if (X.rows() < 2) throw Error("notears_scores: need at least 2 cells");
    const notears::Solution sol = notears::solve(X, opts);
    ScoreMatrix out;
    out.S = sol.W.cwiseAbs();
    out.S = (out.S.array() < opts.threshold).select(0.0, out.S);
    out.S.diagonal().setZero();
    out.symmetric = false;
    out.method_name = "notears";
    out.converged = sol.converged;
    return out;
}

}  // namespace grndiag
