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

#include <functional>

#include <Eigen/Core>

namespace grndiag {

/// f(x, grad) returns the objective and writes the gradient into grad.
using SmoothObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct BoundedLbfgsOptions {
    int memory = 10;
    int max_iterations = 15000;
    /// Relative objective decrease below which the run stops.
    double ftol = 2.220446049250313e-09;
    /// Max-abs projected gradient below which the run stops.
    double gtol = 1e-5;
    int max_line_search = 40;
};

struct BoundedLbfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
};

/// Projected limited-memory BFGS for box constraints lower <= x <= upper.
/// The quasi-Newton direction is built on the variables that are not pinned
/// at an active bound, and the step is found by backtracking along the
/// projected path with an Armijo test.
BoundedLbfgsResult minimize_bounded(const SmoothObjective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, const BoundedLbfgsOptions& opts = {});

}  // namespace grndiag
