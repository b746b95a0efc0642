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

#include "grndiag/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace grndiag {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

// Zero where a bound is active and the gradient pushes further into it.
Eigen::VectorXd free_mask(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper) {
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (lower(i) == upper(i)) {
            mask(i) = 0.0;
        } else if (x(i) <= lower(i) && g(i) > 0.0) {
            mask(i) = 0.0;
        } else if (x(i) >= upper(i) && g(i) < 0.0) {
            mask(i) = 0.0;
        }
    }
    return mask;
}

struct Pair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
};

// Two-loop recursion restricted to the free coordinates.
Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& g, const Eigen::VectorXd& mask, const std::deque<Pair>& memory) {
    Eigen::VectorXd q = g.cwiseProduct(mask);
    std::vector<double> alpha(memory.size());
    std::vector<double> rho(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
        const Eigen::VectorXd s = memory[k].s.cwiseProduct(mask);
        const Eigen::VectorXd y = memory[k].y.cwiseProduct(mask);
        const double sy = s.dot(y);
        rho[k] = sy > 0.0 ? 1.0 / sy : 0.0;
        alpha[k] = rho[k] * s.dot(q);
        q -= alpha[k] * y;
    }
    double gamma = 1.0;
    if (!memory.empty()) {
        const Eigen::VectorXd s = memory.back().s.cwiseProduct(mask);
        const Eigen::VectorXd y = memory.back().y.cwiseProduct(mask);
        const double yy = y.squaredNorm();
        if (yy > 0.0 && s.dot(y) > 0.0) gamma = s.dot(y) / yy;
    }
    Eigen::VectorXd r = gamma * q;
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const Eigen::VectorXd s = memory[k].s.cwiseProduct(mask);
        const Eigen::VectorXd y = memory[k].y.cwiseProduct(mask);
        const double beta = rho[k] * y.dot(r);
        r += s * (alpha[k] - beta);
    }
    return -r.cwiseProduct(mask);
}

}  // namespace

BoundedLbfgsResult minimize_bounded(const SmoothObjective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, const BoundedLbfgsOptions& opts) {
    BoundedLbfgsResult res;
    Eigen::VectorXd x = project(x0, lower, upper);
    Eigen::VectorXd g(x.size());
    double fx = f(x, g);
    res.evaluations = 1;

    std::deque<Pair> memory;
    Eigen::VectorXd g_new(x.size());
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter;
        const Eigen::VectorXd mask = free_mask(x, g, lower, upper);
        const Eigen::VectorXd pg = g.cwiseProduct(mask);
        if (pg.cwiseAbs().maxCoeff() <= opts.gtol) break;

        Eigen::VectorXd d = lbfgs_direction(g, mask, memory);
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            memory.clear();
            d = -pg;
            slope = g.dot(d);
        }
        double t = memory.empty() ? std::min(1.0, 1.0 / pg.norm()) : 1.0;

        Eigen::VectorXd x_new;
        double f_new = fx;
        bool accepted = false;
        for (int ls = 0; ls < opts.max_line_search; ++ls) {
            x_new = project(x + t * d, lower, upper);
            f_new = f(x_new, g_new);
            ++res.evaluations;
            const double decrease = g.dot(x_new - x);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * decrease) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (memory.empty()) break;
            // Stale curvature pairs; retry from steepest descent.
            memory.clear();
            continue;
        }

        Pair pair{x_new - x, g_new - g};
        const double sy = pair.s.dot(pair.y);
        if (sy > 1e-10 * pair.y.squaredNorm()) {
            memory.push_back(std::move(pair));
            if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
        }

        const double rel = (fx - f_new) / std::max({std::abs(fx), std::abs(f_new), 1.0});
        x = std::move(x_new);
        g = g_new;
        fx = f_new;
        if (rel <= opts.ftol) {
            res.iterations = iter + 1;
            break;
        }
    }
    res.x = std::move(x);
    res.f = fx;
    return res;
}

}  // namespace grndiag
