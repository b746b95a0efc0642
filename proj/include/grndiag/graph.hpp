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

#include <vector>

#include "grndiag/core.hpp"

namespace grndiag {

/// Regulatory ground truth. `adjacency`/`weights` describe the graph used to
/// simulate expression; after feedback injection they may contain
/// back-edges. `acyclic_adjacency`/`acyclic_weights` always hold the base DAG,
/// which is the only graph any evaluation looks at.
struct GroundTruthGraph {
    int p = 0;
    AdjacencyMatrix adjacency;
    WeightMatrix weights;
    std::vector<int> topo_order;
    bool is_cyclic = false;

    AdjacencyMatrix acyclic_adjacency;
    WeightMatrix acyclic_weights;

    /// Graph with no edges and the identity order.
    static GroundTruthGraph empty(int p);
    /// Builds a DAG from a weight matrix; the adjacency is its nonzero pattern.
    static GroundTruthGraph from_weights(const WeightMatrix& w);

    const AdjacencyMatrix& evaluation_adjacency() const { return acyclic_adjacency; }
    int edge_count() const;
    int evaluation_edge_count() const;
};

/// reach(a, b) is true iff a is a strict ancestor of b.
struct AncestorMatrix {
    AdjacencyMatrix reach;

    bool operator()(int a, int b) const { return reach(a, b); }
    bool share_ancestor(int i, int j) const;
};

/// Parent-count DAG under the identity order. Each target j draws
/// m_j ~ Binomial(j, rho) parents without replacement from {0..j-1} with
/// selection weight proportional to 1/(i+1); signs are fair coins and
/// magnitudes are uniform on [0.5, 1.0].
GroundTruthGraph sample_dag(int p, double rho, Rng& rng);

/// For every base edge i->j adds j->i with probability phi (magnitude
/// U[0.1, 0.3], random sign), then applies `rescale_for_stability`.
GroundTruthGraph add_feedback(const GroundTruthGraph& g, double phi, Rng& rng);

/// If the spectral radius of `w` exceeds 0.85, multiplies every weight by
/// 0.85 / radius so the result is at most 0.85. Returns true if a rescale happened.
bool rescale_for_stability(WeightMatrix& w);

double spectral_radius(const WeightMatrix& w);
/// Largest singular value.
double spectral_norm(const WeightMatrix& w);

AncestorMatrix ancestor_matrix(const GroundTruthGraph& g);
AncestorMatrix ancestor_matrix(const AdjacencyMatrix& dag);

}  // namespace grndiag
