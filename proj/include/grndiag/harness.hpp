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

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "grndiag/methods.hpp"
#include "grndiag/metrics.hpp"
#include "grndiag/simulator.hpp"

namespace grndiag {

enum class Pathology { dropout, confounders, mixing, feedback, density, sample_size, pseudotime };

inline constexpr std::array<Pathology, 7> kAllPathologies = {
    Pathology::dropout, Pathology::confounders, Pathology::mixing,    Pathology::feedback,
    Pathology::density, Pathology::sample_size, Pathology::pseudotime};

std::string_view to_string(Pathology d);
Pathology parse_pathology(std::string_view name);

/// The five standard levels of a dial, easiest first.
const std::vector<double>& standard_levels(Pathology d);

/// True if `level` lies between the smallest and largest standard level.
bool within_standard_range(Pathology d, double level);

/// Copy of `base` with one dial set. Integer dials (confounders, sample
/// size) reject non-integral levels.
ScenarioConfig apply_level(ScenarioConfig base, Pathology d, double level);

/// Label used in place of a dial name for interaction-grid rows.
inline constexpr std::string_view kInteractionLabel = "interaction";

struct ExperimentSpec {
    ScenarioConfig scenario;
    Method method = Method::pearson;
    std::uint64_t seed = 0;
    /// Dial name, or kInteractionLabel.
    std::string pathology;
    /// Dial level for single-dial rows; 0 for interaction rows.
    double level = 0.0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    double auprc_undirected = 0.0;
    double auprc_directed = 0.0;
    ErrorCounts errors;
    /// Wall clock of the inference call alone.
    double runtime_seconds = 0.0;
    bool converged = true;
};

/// Simulates the experiment's dataset, runs its method and scores the result.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct RunOptions {
    int jobs = 1;
    /// Called after every finished dataset with (done, total); may be empty.
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Runs every spec; specs that share (scenario, seed) share one simulated
/// dataset. Output order equals input order regardless of `jobs`.
std::vector<ExperimentResult> run_experiments(const std::vector<ExperimentSpec>& specs, const RunOptions& opts = {});

struct SweepTable {
    std::vector<ExperimentResult> rows;
};

/// Full product levels x methods x seeds, rows ordered by (level, method,
/// seed) in the order given. Levels outside the standard range are rejected
/// unless `allow_extrapolation` is set.
SweepTable run_single_dial_sweep(Pathology d, const std::vector<double>& levels, const std::vector<Method>& methods,
                                 const std::vector<std::uint64_t>& seeds, ScmKind scm, const RunOptions& opts = {},
                                 bool allow_extrapolation = false);

/// Dropout x confounders x density, each axis listed cleanest first.
struct InteractionGrid {
    std::vector<double> dropout{0.0, 0.3, 0.6, 0.8};
    std::vector<int> confounders{0, 2, 8, 16};
    std::vector<double> density{0.05, 0.1, 0.2, 0.3};

    /// The 2 x 2 x 2 corners of the default grid.
    static InteractionGrid small();
    std::size_t cells() const { return dropout.size() * confounders.size() * density.size(); }
};

/// Rows ordered by (dropout, confounders, density, method, seed).
SweepTable run_interaction_sweep(const InteractionGrid& grid, const std::vector<Method>& methods,
                                 const std::vector<std::uint64_t>& seeds, ScmKind scm, const RunOptions& opts = {});

/// Seeds 0..count-1.
std::vector<std::uint64_t> default_seeds(int count);

struct Summary {
    double mean = 0.0;
    /// Sample standard deviation over sqrt(replicates); 0 for one replicate.
    double sem = 0.0;
    int replicates = 0;
    bool single_replicate = false;
};

/// Throws Error on an empty sample.
Summary summarize(const std::vector<double>& values);

/// One aggregation cell: everything that identifies a scenario except the seed.
struct CellKey {
    ScmKind scm = ScmKind::linear;
    std::string pathology;
    double level = 0.0;
    double dropout = 0.0;
    int confounders = 0;
    double density = 0.0;
    Method method = Method::pearson;

    bool operator==(const CellKey&) const = default;
};

CellKey cell_key(const ExperimentSpec& spec);

struct AggregateRow {
    CellKey key;
    Summary undirected;
    Summary directed;
    Summary runtime;
    /// Error counts summed over replicates.
    ErrorCounts errors;
    int converged_runs = 0;
};

/// Groups results by CellKey in first-appearance order.
std::vector<AggregateRow> aggregate(const std::vector<ExperimentResult>& results);

enum class Metric { undirected, directed };

struct DeltaRow {
    std::string pathology;
    Method method = Method::pearson;
    double easiest_level = 0.0;
    double hardest_level = 0.0;
    double mean_easiest = 0.0;
    double mean_hardest = 0.0;
    /// mean_hardest - mean_easiest.
    double delta = 0.0;
    bool most_robust = false;
    bool most_fragile = false;
};

/// Per dial present in `rows`, the change from its first to its last
/// standard level for every method. Throws if either level is missing.
std::vector<DeltaRow> compute_delta_table(const std::vector<AggregateRow>& rows, Metric metric = Metric::undirected);

struct WinnerCell {
    double dropout = 0.0;
    int confounders = 0;
    double density = 0.0;
    Method winner = Method::pearson;
    double mean_auprc = 0.0;
    bool tie = false;
};

/// Best method by mean undirected AUPRC in every interaction cell; exact ties
/// go to the lexicographically smallest method name and set `tie`.
std::vector<WinnerCell> winner_map(const std::vector<AggregateRow>& rows);

struct InteractionRow {
    Method method = Method::pearson;
    double auprc0 = 0.0;
    double delta_joint = 0.0;
    double delta_d = 0.0;
    double delta_k = 0.0;
    double delta_rho = 0.0;
    double delta_add = 0.0;
    /// delta_joint - delta_add; negative means sub-additive.
    double interaction = 0.0;
};

/// Drops (positive = worse) from the cleanest cell of `grid` to its worst
/// cell and to the three single-axis extremes. Throws if a needed cell is
/// missing.
std::vector<InteractionRow> compute_interaction_summary(const std::vector<AggregateRow>& rows,
                                                        const InteractionGrid& grid);

}  // namespace grndiag
