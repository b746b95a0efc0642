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

#include "grndiag/graph.hpp"
#include "grndiag/methods.hpp"

namespace grndiag {

struct ErrorCounts {
    int true_edges = 0;
    int reversed = 0;
    int confounded = 0;
    int spurious = 0;
    int missed = 0;
    int k = 0;         ///< ground-truth directed edges
    int selected = 0;  ///< pairs admitted to the prediction set (<= k)

    bool operator==(const ErrorCounts&) const = default;
};

struct PrCurvePoint {
    std::size_t rank = 0;  ///< items scored at or above this group's score
    double precision = 0.0;
    double recall = 0.0;
};

/// Precision/recall at every tie-group boundary, highest score first.
std::vector<PrCurvePoint> precision_recall_curve(const std::vector<double>& scores, const std::vector<bool>& labels);

/// Step-wise average precision; tied scores form one group evaluated only at
/// its end. Throws if there is no positive label.
double average_precision(const std::vector<double>& scores, const std::vector<bool>& labels);

/// AP over the p(p-1)/2 unordered pairs with max(S_ij, S_ji) against the
/// symmetrised evaluation adjacency.
double auprc_undirected(const ScoreMatrix& S, const GroundTruthGraph& g);

/// AP over the p(p-1) ordered off-diagonal pairs.
double auprc_directed(const ScoreMatrix& S, const GroundTruthGraph& g);

/// Classifies the top-K ordered pairs with positive score (ties at the cut
/// resolved in lexicographic (i, j) order) as true / reversed / confounded /
/// spurious, and counts missed true edges.
ErrorCounts error_decomposition(const ScoreMatrix& S, const GroundTruthGraph& g, const AncestorMatrix& anc);

/// Normalised decomposition: the four prediction categories over `selected`
/// (all zero when nothing was selected), missed over `k`.
struct ErrorFractions {
    double true_edges = 0.0;
    double reversed = 0.0;
    double confounded = 0.0;
    double spurious = 0.0;
    double missed = 0.0;
};

ErrorFractions error_fractions(const ErrorCounts& counts);

}  // namespace grndiag
