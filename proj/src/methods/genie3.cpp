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

// Random-forest regression importances. Trees are grown on bootstrap
// multiplicities (a row drawn c times carries weight c), consider every
// feature at every split, and stop only at pure or single-row nodes. Split
// search walks per-feature presorted row lists that are stably partitioned
// down the tree, so each level costs O(features x rows).

#include <algorithm>
#include <cfloat>
#include <numeric>

#include "grndiag/methods.hpp"

namespace grndiag {

namespace {

// Adjacent feature values closer than this are not separated.
constexpr double kFeatureThreshold = 1e-7;

using SortedColumns = std::vector<std::vector<int>>;

SortedColumns presort(const ExpressionMatrix& X) {
    SortedColumns order(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
        auto& idx = order[static_cast<std::size_t>(f)];
        idx.resize(static_cast<std::size_t>(X.rows()));
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return X(a, f) < X(b, f); });
    }
    return order;
}

struct NodeStats {
    double w = 0.0;
    double sy = 0.0;
    double syy = 0.0;

    double sse() const { return w > 0.0 ? std::max(syy - sy * sy / w, 0.0) : 0.0; }
};

class TreeBuilder {
   public:
    TreeBuilder(const ExpressionMatrix& X, const Eigen::VectorXd& y, const std::vector<int>& features,
                const SortedColumns& order, int min_samples_split)
        : X_(X), y_(y), features_(features), order_(order), min_samples_split_(min_samples_split) {
        // Content-derived key that breaks exact gain ties independently of
        // column position, which keeps the forest permutation-equivariant.
        tie_key_.reserve(features.size());
        for (int f : features) {
            double key = 0.0;
            for (Eigen::Index r = 0; r < X.rows(); ++r) key += X(r, f) * static_cast<double>(r + 1);
            tie_key_.push_back(key);
        }
    }

    /// Grows one tree on the given bootstrap multiplicities and returns the
    /// unnormalised variance reduction per entry of `features`.
    Eigen::VectorXd grow(const std::vector<int>& counts) {
        const auto n_features = features_.size();
        weight_.assign(counts.begin(), counts.end());
        wy_.resize(counts.size());
        for (std::size_t r = 0; r < counts.size(); ++r) wy_[r] = weight_[r] * y_(static_cast<Eigen::Index>(r));
        m_ = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));

        rows_.assign(n_features * m_, 0);
        values_.assign(n_features * m_, 0.0);
        for (std::size_t fi = 0; fi < n_features; ++fi) {
            std::size_t k = 0;
            const Eigen::Index f = features_[fi];
            for (int r : order_[static_cast<std::size_t>(f)]) {
                if (counts[static_cast<std::size_t>(r)] == 0) continue;
                rows_[fi * m_ + k] = r;
                values_[fi * m_ + k] = X_(r, f);
                ++k;
            }
        }
        scratch_.resize(m_);
        scratch_values_.resize(m_);
        goes_left_.assign(counts.size(), 0);

        Eigen::VectorXd importance = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_features));
        NodeStats root;
        for (std::size_t r = 0; r < counts.size(); ++r) {
            if (counts[r] > 0) add(root, static_cast<int>(r));
        }

        struct Pending {
            std::size_t begin, end;
            NodeStats stats;
        };
        std::vector<Pending> stack{{0, m_, root}};
        while (!stack.empty()) {
            const Pending node = stack.back();
            stack.pop_back();
            const std::size_t size = node.end - node.begin;
            if (size < static_cast<std::size_t>(min_samples_split_)) continue;
            if (node.stats.sse() <= DBL_EPSILON * node.stats.w) continue;

            const Split best = best_split(node.begin, node.end, node.stats);
            if (!best.valid) continue;

            const std::size_t mid = partition(best, node.begin, node.end);
            NodeStats left;
            NodeStats right;
            // Sum in the split feature's order so no statistic depends on
            // column position.
            const int* split_rows = rows_.data() + best.feature * m_;
            for (std::size_t k = node.begin; k < mid; ++k) add(left, split_rows[k]);
            for (std::size_t k = mid; k < node.end; ++k) add(right, split_rows[k]);
            importance(static_cast<Eigen::Index>(best.feature)) += node.stats.sse() - left.sse() - right.sse();
            stack.push_back({node.begin, mid, left});
            stack.push_back({mid, node.end, right});
        }
        return importance;
    }

   private:
    struct Split {
        bool valid = false;
        std::size_t feature = 0;
        std::size_t left_count = 0;
        double score = 0.0;
    };

    void add(NodeStats& s, int r) const {
        const auto k = static_cast<std::size_t>(r);
        s.w += weight_[k];
        s.sy += wy_[k];
        s.syy += wy_[k] * y_(r);
    }

    Split best_split(std::size_t begin, std::size_t end, const NodeStats& parent) const {
        Split best;
        for (std::size_t fi = 0; fi < features_.size(); ++fi) {
            const int* rows = rows_.data() + fi * m_;
            const double* values = values_.data() + fi * m_;
            if (values[end - 1] <= values[begin] + kFeatureThreshold) continue;
            double wl = 0.0;
            double sl = 0.0;
            for (std::size_t k = begin; k + 1 < end; ++k) {
                const auto r = static_cast<std::size_t>(rows[k]);
                wl += weight_[r];
                sl += wy_[r];
                if (values[k + 1] <= values[k] + kFeatureThreshold) continue;
                // Proxy sl^2/wl + sr^2/wr; one rounded value per candidate
                // keeps the comparison a strict weak order.
                const double wr = parent.w - wl;
                const double sr = parent.sy - sl;
                const double score = sl * sl / wl + sr * sr / wr;
                if (!best.valid || score > best.score ||
                    (score == best.score && fi != best.feature && tie_key_[fi] < tie_key_[best.feature])) {
                    best = {true, fi, k + 1 - begin, score};
                }
            }
        }
        return best;
    }

    std::size_t partition(const Split& split, std::size_t begin, std::size_t end) {
        const int* split_rows = rows_.data() + split.feature * m_;
        const std::size_t mid = begin + split.left_count;
        for (std::size_t k = begin; k < end; ++k) goes_left_[static_cast<std::size_t>(split_rows[k])] = k < mid ? 1 : 0;
        for (std::size_t fi = 0; fi < features_.size(); ++fi) {
            if (fi == split.feature) continue;
            int* rows = rows_.data() + fi * m_;
            double* values = values_.data() + fi * m_;
            std::size_t left = begin;
            std::size_t right = 0;
            for (std::size_t k = begin; k < end; ++k) {
                const int r = rows[k];
                const double v = values[k];
                if (goes_left_[static_cast<std::size_t>(r)]) {
                    rows[left] = r;
                    values[left] = v;
                    ++left;
                } else {
                    scratch_[right] = r;
                    scratch_values_[right] = v;
                    ++right;
                }
            }
            std::copy_n(scratch_.begin(), right, rows + left);
            std::copy_n(scratch_values_.begin(), right, values + left);
        }
        return mid;
    }

    const ExpressionMatrix& X_;
    const Eigen::VectorXd& y_;
    const std::vector<int>& features_;
    const SortedColumns& order_;
    int min_samples_split_;
    std::vector<double> tie_key_;

    std::size_t m_ = 0;
    std::vector<double> weight_;
    std::vector<double> wy_;
    std::vector<int> rows_;
    std::vector<double> values_;
    std::vector<int> scratch_;
    std::vector<double> scratch_values_;
    std::vector<char> goes_left_;
};

Eigen::VectorXd target_importances(const ExpressionMatrix& X, int target, const ForestOptions& opts,
                                   const SortedColumns& order, Rng& rng) {
    const Eigen::Index p = X.cols();
    const Eigen::Index n = X.rows();
    Eigen::VectorXd result = Eigen::VectorXd::Zero(p);
    const Eigen::VectorXd y = X.col(target);
    if ((y.array() == y(0)).all()) return result;

    std::vector<int> features;
    for (int f = 0; f < static_cast<int>(p); ++f) {
        if (f != target) features.push_back(f);
    }

    TreeBuilder builder(X, y, features, order, opts.min_samples_split);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
    std::vector<int> counts(static_cast<std::size_t>(n));
    Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(features.size()));
    int informative_trees = 0;
    for (int t = 0; t < opts.trees; ++t) {
        std::fill(counts.begin(), counts.end(), 0);
        for (Eigen::Index k = 0; k < n; ++k) ++counts[static_cast<std::size_t>(pick(rng))];
        const Eigen::VectorXd imp = builder.grow(counts);
        const double sum = imp.sum();
        if (sum > 0.0) {
            total += imp / sum;
            ++informative_trees;
        }
    }
    if (informative_trees == 0) return result;
    total /= total.sum();
    for (std::size_t fi = 0; fi < features.size(); ++fi) result(features[fi]) = total(static_cast<Eigen::Index>(fi));
    return result;
}

}  // namespace

Eigen::VectorXd genie3_target_importances(const ExpressionMatrix& X, int target, const ForestOptions& opts,
                                          Rng& rng) {
    if (target < 0 || target >= X.cols()) throw Error("genie3: target out of range");
    if (X.rows() < 2) throw Error("genie3: need at least 2 cells");
    return target_importances(X, target, opts, presort(X), rng);
}

ScoreMatrix genie3_scores(const ExpressionMatrix& X, std::uint64_t seed, const ForestOptions& opts) {
    if (X.rows() < 10) throw Error("genie3_scores: need at least 10 cells");
    const auto order = presort(X);
    const Eigen::Index p = X.cols();
    ScoreMatrix out;
    out.S = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < static_cast<int>(p); ++j) {
        Rng rng = make_stream(seed, {0x6e3e, static_cast<std::uint64_t>(j)});
        out.S.col(j) = target_importances(X, j, opts, order, rng);
    }
    out.symmetric = false;
    out.method_name = "genie3";
    return out;
}

}  // namespace grndiag
