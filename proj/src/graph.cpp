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

#include "grndiag/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace grndiag {

namespace {

constexpr double kBaseMagnitudeLow = 0.5;
constexpr double kBaseMagnitudeHigh = 1.0;
constexpr double kBackMagnitudeLow = 0.1;
constexpr double kBackMagnitudeHigh = 0.3;
constexpr double kRescaleTarget = 0.85;

double signed_magnitude(Rng& rng, double lo, double hi) {
    std::bernoulli_distribution coin(0.5);
    // uniform_real_distribution is half-open; nextafter closes the interval.
    std::uniform_real_distribution<double> mag(lo, std::nextafter(hi, hi + 1.0));
    const double sign = coin(rng) ? -1.0 : 1.0;
    return sign * mag(rng);
}

AdjacencyMatrix support_of(const WeightMatrix& w) {
    return (w.array() != 0.0).matrix();
}

}  // namespace

GroundTruthGraph GroundTruthGraph::empty(int p) {
    GroundTruthGraph g;
    g.p = p;
    g.adjacency = AdjacencyMatrix::Constant(p, p, false);
    g.weights = WeightMatrix::Zero(p, p);
    g.topo_order.resize(static_cast<std::size_t>(p));
    std::iota(g.topo_order.begin(), g.topo_order.end(), 0);
    g.acyclic_adjacency = g.adjacency;
    g.acyclic_weights = g.weights;
    return g;
}

GroundTruthGraph GroundTruthGraph::from_weights(const WeightMatrix& w) {
    if (w.rows() != w.cols()) throw Error("weight matrix must be square");
    GroundTruthGraph g = empty(static_cast<int>(w.rows()));
    g.weights = w;
    g.weights.diagonal().setZero();
    g.adjacency = support_of(g.weights);
    g.acyclic_adjacency = g.adjacency;
    g.acyclic_weights = g.weights;
    return g;
}

int GroundTruthGraph::edge_count() const {
    return static_cast<int>(adjacency.count());
}

int GroundTruthGraph::evaluation_edge_count() const {
    return static_cast<int>(acyclic_adjacency.count());
}

bool AncestorMatrix::share_ancestor(int i, int j) const {
    for (Eigen::Index a = 0; a < reach.rows(); ++a) {
        if (a != i && a != j && reach(a, i) && reach(a, j)) return true;
    }
    return false;
}

GroundTruthGraph sample_dag(int p, double rho, Rng& rng) {
    if (p < 2) throw Error("sample_dag: need at least 2 genes, got " + std::to_string(p));
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw Error("sample_dag: density must lie in [0, 1], got " + std::to_string(rho));
    }

    GroundTruthGraph g = GroundTruthGraph::empty(p);
    std::vector<int> candidates;
    std::vector<double> weights;

    for (int j = 1; j < p; ++j) {
        std::binomial_distribution<int> count_dist(j, rho);
        const int m = std::min(count_dist(rng), j);

        candidates.resize(static_cast<std::size_t>(j));
        std::iota(candidates.begin(), candidates.end(), 0);
        weights.resize(static_cast<std::size_t>(j));
        for (int i = 0; i < j; ++i) weights[static_cast<std::size_t>(i)] = 1.0 / (i + 1);

        // Sequential weighted draws with removal and renormalisation.
        for (int draw = 0; draw < m; ++draw) {
            const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
            std::uniform_real_distribution<double> u(0.0, total);
            const double target = u(rng);
            double acc = 0.0;
            std::size_t pick = weights.size() - 1;
            for (std::size_t k = 0; k < weights.size(); ++k) {
                acc += weights[k];
                if (target < acc) {
                    pick = k;
                    break;
                }
            }
            const int parent = candidates[pick];
            g.weights(parent, j) = signed_magnitude(rng, kBaseMagnitudeLow, kBaseMagnitudeHigh);
            candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
            weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(pick));
        }
    }

    g.adjacency = support_of(g.weights);
    g.acyclic_adjacency = g.adjacency;
    g.acyclic_weights = g.weights;
    return g;
}

bool rescale_for_stability(WeightMatrix& w) {
    const double radius = spectral_radius(w);
    if (radius <= kRescaleTarget) return false;
    w *= kRescaleTarget / radius;
    return true;
}

GroundTruthGraph add_feedback(const GroundTruthGraph& g, double phi, Rng& rng) {
    if (!(phi >= 0.0 && phi <= 1.0)) {
        throw Error("add_feedback: probability must lie in [0, 1], got " + std::to_string(phi));
    }
    if (g.is_cyclic) throw Error("add_feedback: input graph already has feedback edges");

    GroundTruthGraph out = g;
    std::bernoulli_distribution add(phi);
    bool added = false;
    // Iterate base edges in row-major order so the draw sequence is fixed.
    for (int i = 0; i < g.p; ++i) {
        for (int j = 0; j < g.p; ++j) {
            if (!g.acyclic_adjacency(i, j)) continue;
            if (!add(rng)) continue;
            out.weights(j, i) = signed_magnitude(rng, kBackMagnitudeLow, kBackMagnitudeHigh);
            added = true;
        }
    }
    if (!added) return out;

    rescale_for_stability(out.weights);
    out.adjacency = support_of(out.weights);
    out.is_cyclic = true;
    return out;
}

double spectral_radius(const WeightMatrix& w) {
    if (w.rows() != w.cols()) throw Error("spectral_radius: matrix must be square");
    if (!w.allFinite()) throw Error("spectral_radius: matrix has non-finite entries");
    if (w.size() == 0) return 0.0;
    Eigen::EigenSolver<WeightMatrix> solver(w, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw Error("spectral_radius: eigensolver failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const WeightMatrix& w) {
    if (w.size() == 0) return 0.0;
    Eigen::JacobiSVD<WeightMatrix> svd(w);
    return svd.singularValues()(0);
}

AncestorMatrix ancestor_matrix(const AdjacencyMatrix& dag) {
    const Eigen::Index p = dag.rows();
    AncestorMatrix anc{AdjacencyMatrix::Constant(p, p, false)};
    // Warshall closure over booleans; p is small.
    anc.reach = dag;
    for (Eigen::Index k = 0; k < p; ++k) {
        for (Eigen::Index a = 0; a < p; ++a) {
            if (!anc.reach(a, k)) continue;
            for (Eigen::Index b = 0; b < p; ++b) {
                if (anc.reach(k, b)) anc.reach(a, b) = true;
            }
        }
    }
    for (Eigen::Index a = 0; a < p; ++a) {
        if (anc.reach(a, a)) throw Error("ancestor_matrix: graph contains a cycle");
    }
    return anc;
}

AncestorMatrix ancestor_matrix(const GroundTruthGraph& g) {
    return ancestor_matrix(g.acyclic_adjacency);
}

}  // namespace grndiag
