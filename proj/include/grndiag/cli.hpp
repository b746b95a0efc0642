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

#include <iosfwd>
#include <string>
#include <vector>

#include "grndiag/harness.hpp"

namespace grndiag::cli {

// Output file names. Everything except the two raw_results files and the
// manifests is byte-stable across re-runs.
inline constexpr const char* kSweepRaw = "raw_results.csv";
inline constexpr const char* kSweepRawStable = "raw_metrics.csv";
inline constexpr const char* kSweepAggregate = "aggregate.csv";
inline constexpr const char* kSweepDeltas = "deltas.csv";
inline constexpr const char* kSweepErrors = "error_decomposition.csv";
inline constexpr const char* kSweepManifest = "sweep_manifest.json";

inline constexpr const char* kInteractionRaw = "interaction_raw_results.csv";
inline constexpr const char* kInteractionRawStable = "interaction_raw_metrics.csv";
inline constexpr const char* kInteractionAggregate = "interaction_aggregate.csv";
inline constexpr const char* kWinnerMap = "winner_map.csv";
inline constexpr const char* kInteractionSummary = "interaction_summary.csv";
inline constexpr const char* kInteractionManifest = "interaction_manifest.json";

inline constexpr const char* kReportDegradation = "degradation.csv";
inline constexpr const char* kReportErrorFractions = "error_fractions.csv";
inline constexpr const char* kReportOverlay = "linear_vs_tanh.csv";
inline constexpr const char* kReportPareto = "pareto.csv";

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

/// Comma-separated numbers; throws Error naming the offending token.
std::vector<double> parse_number_list(const std::string& text);

/// Columns: scm_kind,pathology,level,method,seed,auprc_undirected,
/// auprc_directed,true,reversed,confounded,spurious,missed,k_edges,selected,
/// [runtime_s,]converged
void write_sweep_raw(std::ostream& os, const std::vector<ExperimentResult>& rows, bool with_runtime);

/// As write_sweep_raw with pathology,level replaced by dropout,confounders,density.
void write_interaction_raw(std::ostream& os, const std::vector<ExperimentResult>& rows, bool with_runtime);

/// Columns: scm_kind,pathology,level,method,replicates,auprc_undirected_mean,
/// auprc_undirected_sem,auprc_directed_mean,auprc_directed_sem,
/// single_replicate,converged_runs
void write_sweep_aggregate(std::ostream& os, const std::vector<AggregateRow>& rows);

/// As write_sweep_aggregate with pathology,level replaced by
/// dropout,confounders,density.
void write_interaction_aggregate(std::ostream& os, const std::vector<AggregateRow>& rows);

/// Columns: scm_kind,pathology,method,metric,easiest_level,hardest_level,
/// mean_easiest,mean_hardest,delta,most_robust,most_fragile
void write_deltas(std::ostream& os, ScmKind scm, const std::vector<DeltaRow>& undirected,
                  const std::vector<DeltaRow>& directed);

/// Error counts summed over seeds per cell, followed by their fractions.
/// Columns: scm_kind,pathology,level,method,replicates,k_edges,selected,true,
/// reversed,confounded,spurious,missed,true_frac,reversed_frac,
/// confounded_frac,spurious_frac,missed_frac
void write_error_decomposition(std::ostream& os, const std::vector<AggregateRow>& rows);

/// Columns: dropout,confounders,density,winner,mean_auprc,tie
void write_winner_map(std::ostream& os, const std::vector<WinnerCell>& cells);

/// Columns: method,auprc0,delta_joint,delta_d,delta_k,delta_rho,interaction
void write_interaction_summary(std::ostream& os, const std::vector<InteractionRow>& rows);

/// Reads a file written by write_sweep_raw with runtimes. The scenario of
/// each row is rebuilt from its dial and level.
std::vector<ExperimentResult> read_sweep_raw(std::istream& is);

/// Columns: scm_kind,pathology,level,method,metric,mean,sem
void write_degradation(std::ostream& os, const std::vector<AggregateRow>& rows);

/// Fractions at the hardest standard level of each dial present.
/// Columns: scm_kind,pathology,level,method,selected,k_edges,true_frac,
/// reversed_frac,confounded_frac,spurious_frac,missed_frac
void write_error_fractions(std::ostream& os, const std::vector<AggregateRow>& rows);

/// Cells present for both SCM kinds.
/// Columns: pathology,level,method,linear_mean,tanh_mean,difference
void write_overlay(std::ostream& os, const std::vector<AggregateRow>& rows);

/// Per SCM kind and method, means over every run.
/// Columns: scm_kind,method,runs,mean_auprc_undirected,mean_runtime_s
void write_pareto(std::ostream& os, const std::vector<ExperimentResult>& rows);

/// Entry point of the grndiag executable; returns the process exit status.
int run(int argc, char** argv);

}  // namespace grndiag::cli
