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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace grndiag {

/// Cells in rows, genes in columns.
using ExpressionMatrix = Eigen::MatrixXd;
using WeightMatrix = Eigen::MatrixXd;
using AdjacencyMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Deterministic sub-stream keyed by a seed and a list of tags. Streams with
/// different tags are statistically independent, so every stochastic stage of
/// the pipeline can draw from its own stream without shifting the others.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * tags.size());
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    for (auto t : tags) {
        words.push_back(static_cast<std::uint32_t>(t));
        words.push_back(static_cast<std::uint32_t>(t >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

/// Child stream from a parent stream; consumes one draw from the parent.
inline Rng split_stream(Rng& parent, std::uint64_t tag) {
    return make_stream(parent(), {tag});
}

}  // namespace grndiag
