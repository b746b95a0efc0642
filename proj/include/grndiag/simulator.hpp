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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "grndiag/core.hpp"
#include "grndiag/graph.hpp"

namespace grndiag {

enum class ScmKind { linear, tanh };

std::string_view to_string(ScmKind kind);
ScmKind parse_scm_kind(std::string_view name);

/// Full dial state of one simulated scenario. Defaults are the benign
/// baseline: 25 genes, 800 cells, density 0.1, unit noise, no pathology.
struct ScenarioConfig {
    int p = 25;
    int n = 800;
    double sigma = 1.0;
    double rho = 0.1;
    double dropout = 0.0;
    int confounders = 0;
    double mixing = 0.0;
    double feedback = 0.0;
    double pseudotime = 0.0;
    ScmKind scm_kind = ScmKind::linear;
    double confounder_load_prob = 0.3;
    int pseudotime_chunks = 10;

    /// Throws Error on values that cannot be simulated at all.
    void validate() const;
    std::string describe() const;

    bool operator==(const ScenarioConfig&) const = default;
};

struct Dataset {
    ExpressionMatrix X;
    GroundTruthGraph truth;
    ScenarioConfig scenario;
    std::uint64_t seed = 0;
    /// Per-row origin for mixture datasets: 0 = primary SCM, 1 = secondary.
    /// Empty when no mixing was simulated.
    std::vector<int> row_source;
};

/// n x p matrix of exogenous noise, one row per cell.
struct NoiseMatrix {
    ExpressionMatrix eps;
};

NoiseMatrix sample_noise(int n, int p, double sigma, Rng& rng);

/// eps (I - W)^{-1}. Throws if I - W is numerically singular.
ExpressionMatrix simulate_linear(const WeightMatrix& w, const NoiseMatrix& noise);
ExpressionMatrix simulate_linear(const GroundTruthGraph& g, const NoiseMatrix& noise);

/// Forward substitution along the identity order; only valid for strictly
/// upper-triangular weights. Kept as an independent route to the matrix form.
ExpressionMatrix simulate_linear_ancestral(const WeightMatrix& w, const NoiseMatrix& noise);

struct FixedPointReport {
    int iterations = 0;
    double last_update = 0.0;
};

/// X_j = tanh(sum_i W_ij X_i) + eps_j. Acyclic weights are sampled in
/// topological order; cyclic ones by fixed-point iteration up to 1000 sweeps
/// with a 1e-8 max-abs update tolerance.
ExpressionMatrix simulate_tanh(const WeightMatrix& w, bool cyclic, const NoiseMatrix& noise,
                               FixedPointReport* report = nullptr);
ExpressionMatrix simulate_tanh(const GroundTruthGraph& g, const NoiseMatrix& noise,
                               FixedPointReport* report = nullptr);

/// Adds k latent Gaussian factors through a p x k loading matrix whose
/// N(0,1) entries are kept with probability `load_prob`.
NoiseMatrix add_confounders(const NoiseMatrix& noise, int k, double load_prob, Rng& rng,
                            Eigen::MatrixXd* loadings_out = nullptr);

/// Mean over all entries of exp(-lambda (X_ij - X_min)).
double expected_dropout_rate(const ExpressionMatrix& X, double lambda);

/// Bisection for lambda so that the expected dropout rate is within 0.01 of
/// `delta`.
double calibrate_dropout(const ExpressionMatrix& X, double delta);

/// Keeps each entry with probability 1 - exp(-lambda (X_ij - X_min)); dropped
/// entries become exactly zero.
ExpressionMatrix apply_dropout(const ExpressionMatrix& X, double lambda, Rng& rng);

/// Draws a secondary graph with the same (p, rho), simulates round(alpha n)
/// cells from it and the rest from `g1`, then shuffles rows.
Dataset simulate_mixture(const GroundTruthGraph& g1, double alpha, const ScenarioConfig& scenario,
                         Rng& rng);

/// Multiplier applied to every weight in pseudotime chunk `chunk`.
double pseudotime_scale(double tau, int chunk, int chunks);

/// Rows of chunk c come from W * pseudotime_scale(tau, c); rows stay in
/// pseudotime order.
Dataset simulate_pseudotime(const GroundTruthGraph& g, double tau, const ScenarioConfig& scenario,
                            Rng& rng);

/// Deterministic given (scenario, seed).
Dataset generate_dataset(const ScenarioConfig& scenario, std::uint64_t seed);

/// Writes `<stem>.csv` (header g0..g{p-1}, one row per cell) and
/// `<stem>_edges.csv` (i,j,weight for the evaluation graph).
void write_dataset_table(const Dataset& data, const std::filesystem::path& stem);

struct DatasetTable {
    ExpressionMatrix X;
    WeightMatrix weights;
};
DatasetTable read_dataset_table(const std::filesystem::path& stem);

}  // namespace grndiag
