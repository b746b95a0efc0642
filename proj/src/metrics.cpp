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

#include "grndiag/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace grndiag {

namespace {

void check_scorable(const ScoreMatrix& S, const GroundTruthGraph& g) {
    if (S.S.rows() != g.p || S.S.cols() != g.p) throw Error("score matrix does not match the graph size");
    if (g.evaluation_edge_count() == 0) throw Error("AUPRC is undefined on a graph without edges");
}

}  // namespace

std::vector<PrCurvePoint> precision_recall_curve(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) throw Error("average_precision: scores and labels differ in length");
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
    if (positives == 0) throw Error("average_precision: no positive labels");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<PrCurvePoint> curve;
    std::size_t hits = 0;
    std::size_t k = 0;
    while (k < order.size()) {
        const double group_score = scores[order[k]];
        while (k < order.size() && scores[order[k]] == group_score) {
            if (labels[order[k]]) ++hits;
            ++k;
        }
        curve.push_back({k, static_cast<double>(hits) / static_cast<double>(k),
                         static_cast<double>(hits) / static_cast<double>(positives)});
    }
    return curve;
}

double average_precision(const std::vector<double>& scores, const std::vector<bool>& labels) {
    double ap = 0.0;
    double prev_recall = 0.0;
    for (const auto& pt : precision_recall_curve(scores, labels)) {
        ap += (pt.recall - prev_recall) * pt.precision;
        prev_recall = pt.recall;
    }
    return ap;
}

double auprc_undirected(const ScoreMatrix& S, const GroundTruthGraph& g) {
    check_scorable(S, g);
    const auto& A = g.evaluation_adjacency();
    std::vector<double> scores;
    std::vector<bool> labels;
    for (int i = 0; i < g.p; ++i) {
        for (int j = i + 1; j < g.p; ++j) {
            scores.push_back(std::max(S.S(i, j), S.S(j, i)));
            labels.push_back(A(i, j) || A(j, i));
        }
    }
    return average_precision(scores, labels);
}

double auprc_directed(const ScoreMatrix& S, const GroundTruthGraph& g) {
    check_scorable(S, g);
    const auto& A = g.evaluation_adjacency();
    std::vector<double> scores;
    std::vector<bool> labels;
    for (int i = 0; i < g.p; ++i) {
        for (int j = 0; j < g.p; ++j) {
            if (i == j) continue;
            scores.push_back(S.S(i, j));
            labels.push_back(A(i, j));
        }
    }
    return average_precision(scores, labels);
}

ErrorCounts error_decomposition(const ScoreMatrix& S, const GroundTruthGraph& g, const AncestorMatrix& anc) {
    if (S.S.rows() != g.p || S.S.cols() != g.p) throw Error("score matrix does not match the graph size");
    const auto& A = g.evaluation_adjacency();
    ErrorCounts out;
    out.k = static_cast<int>(A.count());
    if (out.k == 0) throw Error("error_decomposition: ground truth has no edges");

    struct Candidate {
        double score;
        int i, j;
    };
    std::vector<Candidate> pool;
    for (int i = 0; i < g.p; ++i) {
        for (int j = 0; j < g.p; ++j) {
            if (i != j && S.S(i, j) > 0.0) pool.push_back({S.S(i, j), i, j});
        }
    }
    // Candidates are generated in lexicographic order, so a stable sort keeps
    // (i, j) order inside every tie.
    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    const auto take = std::min(pool.size(), static_cast<std::size_t>(out.k));
    out.selected = static_cast<int>(take);
    for (std::size_t k = 0; k < take; ++k) {
        const int i = pool[k].i;
        const int j = pool[k].j;
        if (A(i, j)) {
            ++out.true_edges;
        } else if (A(j, i)) {
            ++out.reversed;
        } else if (anc.share_ancestor(i, j)) {
            ++out.confounded;
        } else {
            ++out.spurious;
        }
    }
    out.missed = out.k - out.true_edges;
    return out;
}

ErrorFractions error_fractions(const ErrorCounts& counts) {
    ErrorFractions f;
    if (counts.selected > 0) {
        const auto sel = static_cast<double>(counts.selected);
        f.true_edges = counts.true_edges / sel;
        f.reversed = counts.reversed / sel;
        f.confounded = counts.confounded / sel;
        f.spurious = counts.spurious / sel;
    }
    if (counts.k > 0) f.missed = counts.missed / static_cast<double>(counts.k);
    return f;
}

}  // namespace grndiag
