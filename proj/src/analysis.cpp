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
#include <cmath>
#include <sstream>

#include "grndiag/harness.hpp"

namespace grndiag {

namespace {

const AggregateRow* find_row(const std::vector<AggregateRow>& rows, const std::string& pathology, double level,
                             Method m) {
    for (const auto& r : rows) {
        if (r.key.pathology == pathology && r.key.level == level && r.key.method == m) return &r;
    }
    return nullptr;
}

const AggregateRow* find_cell(const std::vector<AggregateRow>& rows, double dropout, int k, double rho, Method m) {
    for (const auto& r : rows) {
        if (r.key.pathology == kInteractionLabel && r.key.dropout == dropout && r.key.confounders == k &&
            r.key.density == rho && r.key.method == m) {
            return &r;
        }
    }
    return nullptr;
}

std::vector<Method> methods_in(const std::vector<AggregateRow>& rows, std::string_view pathology) {
    std::vector<Method> out;
    for (const auto& r : rows) {
        if (r.key.pathology == pathology && std::find(out.begin(), out.end(), r.key.method) == out.end()) {
            out.push_back(r.key.method);
        }
    }
    return out;
}

double mean_of(const AggregateRow& r, Metric metric) {
    return metric == Metric::undirected ? r.undirected.mean : r.directed.mean;
}

}  // namespace

Summary summarize(const std::vector<double>& values) {
    if (values.empty()) throw Error("summarize: empty group");
    Summary s;
    s.replicates = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() == 1) {
        s.single_replicate = true;
        return s;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double n = static_cast<double>(values.size());
    s.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return s;
}

CellKey cell_key(const ExperimentSpec& spec) {
    return {spec.scenario.scm_kind, spec.pathology,          spec.level, spec.scenario.dropout,
            spec.scenario.confounders, spec.scenario.rho, spec.method};
}

std::vector<AggregateRow> aggregate(const std::vector<ExperimentResult>& results) {
    struct Group {
        CellKey key;
        std::vector<double> undirected, directed, runtime;
        ErrorCounts errors;
        int converged = 0;
    };
    std::vector<Group> groups;
    for (const auto& r : results) {
        const CellKey key = cell_key(r.spec);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.key == key; });
        if (it == groups.end()) {
            groups.push_back({key, {}, {}, {}, {}, 0});
            it = groups.end() - 1;
        }
        it->undirected.push_back(r.auprc_undirected);
        it->directed.push_back(r.auprc_directed);
        it->runtime.push_back(r.runtime_seconds);
        it->errors.true_edges += r.errors.true_edges;
        it->errors.reversed += r.errors.reversed;
        it->errors.confounded += r.errors.confounded;
        it->errors.spurious += r.errors.spurious;
        it->errors.missed += r.errors.missed;
        it->errors.k += r.errors.k;
        it->errors.selected += r.errors.selected;
        if (r.converged) ++it->converged;
    }
    std::vector<AggregateRow> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        out.push_back({g.key, summarize(g.undirected), summarize(g.directed), summarize(g.runtime), g.errors,
                       g.converged});
    }
    return out;
}

std::vector<DeltaRow> compute_delta_table(const std::vector<AggregateRow>& rows, Metric metric) {
    std::vector<DeltaRow> out;
    for (Pathology d : kAllPathologies) {
        const std::string name(to_string(d));
        const auto methods = methods_in(rows, name);
        if (methods.empty()) continue;
        const double easiest = standard_levels(d).front();
        const double hardest = standard_levels(d).back();
        const std::size_t first = out.size();
        for (Method m : methods) {
            const AggregateRow* lo = find_row(rows, name, easiest, m);
            const AggregateRow* hi = find_row(rows, name, hardest, m);
            if (lo == nullptr || hi == nullptr) {
                std::ostringstream os;
                os << "delta table: dial '" << name << "' needs levels " << easiest << " and " << hardest
                   << " for method " << to_string(m);
                throw Error(os.str());
            }
            DeltaRow row;
            row.pathology = name;
            row.method = m;
            row.easiest_level = easiest;
            row.hardest_level = hardest;
            row.mean_easiest = mean_of(*lo, metric);
            row.mean_hardest = mean_of(*hi, metric);
            row.delta = row.mean_hardest - row.mean_easiest;
            out.push_back(row);
        }
        // First method wins ties, matching the input method order.
        std::size_t robust = first;
        std::size_t fragile = first;
        for (std::size_t i = first; i < out.size(); ++i) {
            if (std::abs(out[i].delta) < std::abs(out[robust].delta)) robust = i;
            if (std::abs(out[i].delta) > std::abs(out[fragile].delta)) fragile = i;
        }
        out[robust].most_robust = true;
        out[fragile].most_fragile = true;
    }
    return out;
}

std::vector<WinnerCell> winner_map(const std::vector<AggregateRow>& rows) {
    std::vector<WinnerCell> out;
    for (const auto& r : rows) {
        if (r.key.pathology != kInteractionLabel) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const WinnerCell& c) {
            return c.dropout == r.key.dropout && c.confounders == r.key.confounders && c.density == r.key.density;
        });
        const double value = r.undirected.mean;
        if (it == out.end()) {
            out.push_back({r.key.dropout, r.key.confounders, r.key.density, r.key.method, value, false});
            continue;
        }
        if (value > it->mean_auprc) {
            it->winner = r.key.method;
            it->mean_auprc = value;
            it->tie = false;
        } else if (value == it->mean_auprc) {
            it->tie = true;
            if (to_string(r.key.method) < to_string(it->winner)) it->winner = r.key.method;
        }
    }
    return out;
}

std::vector<InteractionRow> compute_interaction_summary(const std::vector<AggregateRow>& rows,
                                                        const InteractionGrid& grid) {
    if (grid.cells() == 0) throw Error("interaction summary: every grid axis must be nonempty");
    const double d0 = grid.dropout.front();
    const double d1 = grid.dropout.back();
    const int k0 = grid.confounders.front();
    const int k1 = grid.confounders.back();
    const double r0 = grid.density.front();
    const double r1 = grid.density.back();

    std::vector<InteractionRow> out;
    for (Method m : methods_in(rows, kInteractionLabel)) {
        auto cell = [&](double d, int k, double rho) {
            const AggregateRow* r = find_cell(rows, d, k, rho, m);
            if (r == nullptr) {
                std::ostringstream os;
                os << "interaction summary: missing cell (dropout " << d << ", confounders " << k << ", density " << rho
                   << ") for method " << to_string(m);
                throw Error(os.str());
            }
            return r->undirected.mean;
        };
        InteractionRow row;
        row.method = m;
        row.auprc0 = cell(d0, k0, r0);
        row.delta_joint = row.auprc0 - cell(d1, k1, r1);
        row.delta_d = row.auprc0 - cell(d1, k0, r0);
        row.delta_k = row.auprc0 - cell(d0, k1, r0);
        row.delta_rho = row.auprc0 - cell(d0, k0, r1);
        row.delta_add = row.delta_d + row.delta_k + row.delta_rho;
        row.interaction = row.delta_joint - row.delta_add;
        out.push_back(row);
    }
    return out;
}

}  // namespace grndiag
