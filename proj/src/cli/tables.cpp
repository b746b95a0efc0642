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

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "grndiag/cli.hpp"

namespace grndiag::cli {

namespace {

const char* flag(bool b) { return b ? "1" : "0"; }

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(std::string s) {
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    s = first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("not a number: '" + s + "'");
    return v;
}

int parse_int(const std::string& s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("not an integer: '" + s + "'");
    return v;
}

void write_metrics(std::ostream& os, const ExperimentResult& r, bool with_runtime) {
    const auto& e = r.errors;
    os << r.spec.seed << ',' << format_number(r.auprc_undirected) << ',' << format_number(r.auprc_directed) << ','
       << e.true_edges << ',' << e.reversed << ',' << e.confounded << ',' << e.spurious << ',' << e.missed << ','
       << e.k << ',' << e.selected << ',';
    if (with_runtime) os << format_number(r.runtime_seconds) << ',';
    os << flag(r.converged) << '\n';
}

const char* kMetricColumns =
    "seed,auprc_undirected,auprc_directed,true,reversed,confounded,spurious,missed,k_edges,selected,";

void write_summaries(std::ostream& os, const AggregateRow& r) {
    os << r.undirected.replicates << ',' << format_number(r.undirected.mean) << ',' << format_number(r.undirected.sem)
       << ',' << format_number(r.directed.mean) << ',' << format_number(r.directed.sem) << ','
       << flag(r.undirected.single_replicate) << ',' << r.converged_runs << '\n';
}

const char* kSummaryColumns =
    "replicates,auprc_undirected_mean,auprc_undirected_sem,auprc_directed_mean,auprc_directed_sem,single_replicate,"
    "converged_runs\n";

bool is_dial(const std::string& name) {
    return std::any_of(kAllPathologies.begin(), kAllPathologies.end(),
                       [&](Pathology d) { return to_string(d) == name; });
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("format_number: conversion failed");
    return std::string(buf, ptr);
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& token : split(text, ',')) {
        if (token.empty()) throw Error("empty entry in list '" + text + "'");
        out.push_back(parse_double(token));
    }
    if (out.empty()) throw Error("empty list");
    return out;
}

void write_sweep_raw(std::ostream& os, const std::vector<ExperimentResult>& rows, bool with_runtime) {
    os << "scm_kind,pathology,level,method," << kMetricColumns << (with_runtime ? "runtime_s," : "") << "converged\n";
    for (const auto& r : rows) {
        os << to_string(r.spec.scenario.scm_kind) << ',' << r.spec.pathology << ',' << format_number(r.spec.level)
           << ',' << to_string(r.spec.method) << ',';
        write_metrics(os, r, with_runtime);
    }
}

void write_interaction_raw(std::ostream& os, const std::vector<ExperimentResult>& rows, bool with_runtime) {
    os << "scm_kind,dropout,confounders,density,method," << kMetricColumns << (with_runtime ? "runtime_s," : "")
       << "converged\n";
    for (const auto& r : rows) {
        const auto& s = r.spec.scenario;
        os << to_string(s.scm_kind) << ',' << format_number(s.dropout) << ',' << s.confounders << ','
           << format_number(s.rho) << ',' << to_string(r.spec.method) << ',';
        write_metrics(os, r, with_runtime);
    }
}

void write_sweep_aggregate(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "scm_kind,pathology,level,method," << kSummaryColumns;
    for (const auto& r : rows) {
        os << to_string(r.key.scm) << ',' << r.key.pathology << ',' << format_number(r.key.level) << ','
           << to_string(r.key.method) << ',';
        write_summaries(os, r);
    }
}

void write_interaction_aggregate(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "scm_kind,dropout,confounders,density,method," << kSummaryColumns;
    for (const auto& r : rows) {
        os << to_string(r.key.scm) << ',' << format_number(r.key.dropout) << ',' << r.key.confounders << ','
           << format_number(r.key.density) << ',' << to_string(r.key.method) << ',';
        write_summaries(os, r);
    }
}

void write_deltas(std::ostream& os, ScmKind scm, const std::vector<DeltaRow>& undirected,
                  const std::vector<DeltaRow>& directed) {
    os << "scm_kind,pathology,method,metric,easiest_level,hardest_level,mean_easiest,mean_hardest,delta,most_robust,"
          "most_fragile\n";
    auto emit = [&](const std::vector<DeltaRow>& rows, const char* metric) {
        for (const auto& d : rows) {
            os << to_string(scm) << ',' << d.pathology << ',' << to_string(d.method) << ',' << metric << ','
               << format_number(d.easiest_level) << ',' << format_number(d.hardest_level) << ','
               << format_number(d.mean_easiest) << ',' << format_number(d.mean_hardest) << ','
               << format_number(d.delta) << ',' << flag(d.most_robust) << ',' << flag(d.most_fragile) << '\n';
        }
    };
    emit(undirected, "undirected");
    emit(directed, "directed");
}

void write_error_decomposition(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "scm_kind,pathology,level,method,replicates,k_edges,selected,true,reversed,confounded,spurious,missed,"
          "true_frac,reversed_frac,confounded_frac,spurious_frac,missed_frac\n";
    for (const auto& r : rows) {
        const auto& e = r.errors;
        const ErrorFractions f = error_fractions(e);
        os << to_string(r.key.scm) << ',' << r.key.pathology << ',' << format_number(r.key.level) << ','
           << to_string(r.key.method) << ',' << r.undirected.replicates << ',' << e.k << ',' << e.selected << ','
           << e.true_edges << ',' << e.reversed << ',' << e.confounded << ',' << e.spurious << ',' << e.missed << ','
           << format_number(f.true_edges) << ',' << format_number(f.reversed) << ',' << format_number(f.confounded)
           << ',' << format_number(f.spurious) << ',' << format_number(f.missed) << '\n';
    }
}

void write_winner_map(std::ostream& os, const std::vector<WinnerCell>& cells) {
    os << "dropout,confounders,density,winner,mean_auprc,tie\n";
    for (const auto& c : cells) {
        os << format_number(c.dropout) << ',' << c.confounders << ',' << format_number(c.density) << ','
           << to_string(c.winner) << ',' << format_number(c.mean_auprc) << ',' << flag(c.tie) << '\n';
    }
}

void write_interaction_summary(std::ostream& os, const std::vector<InteractionRow>& rows) {
    os << "method,auprc0,delta_joint,delta_d,delta_k,delta_rho,interaction\n";
    for (const auto& r : rows) {
        os << to_string(r.method) << ',' << format_number(r.auprc0) << ',' << format_number(r.delta_joint) << ','
           << format_number(r.delta_d) << ',' << format_number(r.delta_k) << ',' << format_number(r.delta_rho) << ','
           << format_number(r.interaction) << '\n';
    }
}

std::vector<ExperimentResult> read_sweep_raw(std::istream& is) {
    static const std::string kHeader =
        "scm_kind,pathology,level,method,seed,auprc_undirected,auprc_directed,true,reversed,confounded,spurious,"
        "missed,k_edges,selected,runtime_s,converged";
    std::string line;
    if (!std::getline(is, line) || line != kHeader) throw Error("raw results: unexpected header '" + line + "'");
    std::vector<ExperimentResult> out;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        try {
            if (f.size() != 16) throw Error("expected 16 fields, found " + std::to_string(f.size()));
            if (!is_dial(f[1])) throw Error("unknown pathology '" + f[1] + "'");
            ExperimentResult r;
            ScenarioConfig base;
            base.scm_kind = parse_scm_kind(f[0]);
            r.spec.pathology = f[1];
            r.spec.level = parse_double(f[2]);
            r.spec.scenario = apply_level(base, parse_pathology(f[1]), r.spec.level);
            r.spec.method = parse_method(f[3]);
            r.spec.seed = static_cast<std::uint64_t>(parse_int(f[4]));
            r.auprc_undirected = parse_double(f[5]);
            r.auprc_directed = parse_double(f[6]);
            r.errors = {parse_int(f[7]),  parse_int(f[8]),  parse_int(f[9]), parse_int(f[10]),
                        parse_int(f[11]), parse_int(f[12]), parse_int(f[13])};
            r.runtime_seconds = parse_double(f[14]);
            r.converged = f[15] == "1";
            out.push_back(std::move(r));
        } catch (const Error& e) {
            throw Error("raw results line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_degradation(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "scm_kind,pathology,level,method,metric,mean,sem\n";
    for (const auto& r : rows) {
        const std::string prefix = std::string(to_string(r.key.scm)) + ',' + r.key.pathology + ',' +
                                   format_number(r.key.level) + ',' + std::string(to_string(r.key.method)) + ',';
        os << prefix << "undirected," << format_number(r.undirected.mean) << ',' << format_number(r.undirected.sem)
           << '\n';
        os << prefix << "directed," << format_number(r.directed.mean) << ',' << format_number(r.directed.sem) << '\n';
    }
}

void write_error_fractions(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "scm_kind,pathology,level,method,selected,k_edges,true_frac,reversed_frac,confounded_frac,spurious_frac,"
          "missed_frac\n";
    for (const auto& r : rows) {
        if (!is_dial(r.key.pathology)) continue;
        if (r.key.level != standard_levels(parse_pathology(r.key.pathology)).back()) continue;
        const ErrorFractions f = error_fractions(r.errors);
        os << to_string(r.key.scm) << ',' << r.key.pathology << ',' << format_number(r.key.level) << ','
           << to_string(r.key.method) << ',' << r.errors.selected << ',' << r.errors.k << ','
           << format_number(f.true_edges) << ',' << format_number(f.reversed) << ',' << format_number(f.confounded)
           << ',' << format_number(f.spurious) << ',' << format_number(f.missed) << '\n';
    }
}

void write_overlay(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "pathology,level,method,linear_mean,tanh_mean,difference\n";
    for (const auto& lin : rows) {
        if (lin.key.scm != ScmKind::linear) continue;
        CellKey twin = lin.key;
        twin.scm = ScmKind::tanh;
        const auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& r) { return r.key == twin; });
        if (it == rows.end()) continue;
        os << lin.key.pathology << ',' << format_number(lin.key.level) << ',' << to_string(lin.key.method) << ','
           << format_number(lin.undirected.mean) << ',' << format_number(it->undirected.mean) << ','
           << format_number(it->undirected.mean - lin.undirected.mean) << '\n';
    }
}

void write_pareto(std::ostream& os, const std::vector<ExperimentResult>& rows) {
    struct Acc {
        ScmKind scm;
        Method method;
        int runs = 0;
        double auprc = 0.0;
        double runtime = 0.0;
    };
    std::vector<Acc> acc;
    for (const auto& r : rows) {
        const ScmKind scm = r.spec.scenario.scm_kind;
        auto it = std::find_if(acc.begin(), acc.end(),
                               [&](const Acc& a) { return a.scm == scm && a.method == r.spec.method; });
        if (it == acc.end()) {
            acc.push_back({scm, r.spec.method});
            it = acc.end() - 1;
        }
        ++it->runs;
        it->auprc += r.auprc_undirected;
        it->runtime += r.runtime_seconds;
    }
    os << "scm_kind,method,runs,mean_auprc_undirected,mean_runtime_s\n";
    for (const auto& a : acc) {
        os << to_string(a.scm) << ',' << to_string(a.method) << ',' << a.runs << ',' << format_number(a.auprc / a.runs)
           << ',' << format_number(a.runtime / a.runs) << '\n';
    }
}

}  // namespace grndiag::cli
