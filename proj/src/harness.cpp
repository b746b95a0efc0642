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

#include "grndiag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace grndiag {

namespace {

const std::vector<double> kDropoutLevels{0.0, 0.2, 0.4, 0.6, 0.8};
const std::vector<double> kConfounderLevels{0, 2, 4, 8, 16};
const std::vector<double> kMixingLevels{0.0, 0.1, 0.25, 0.4, 0.5};
const std::vector<double> kFeedbackLevels{0.0, 0.1, 0.2, 0.3, 0.5};
const std::vector<double> kDensityLevels{0.05, 0.1, 0.15, 0.2, 0.3};
const std::vector<double> kSampleSizeLevels{200, 400, 800, 1600, 3200};
const std::vector<double> kPseudotimeLevels{0.0, 0.2, 0.5, 1.0, 1.5};

int integral_level(Pathology d, double level) {
    if (level != std::round(level)) {
        throw Error("level " + std::to_string(level) + " of dial '" + std::string(to_string(d)) + "' must be an integer");
    }
    return static_cast<int>(level);
}

auto scenario_tuple(const ScenarioConfig& s) {
    return std::make_tuple(s.p, s.n, s.sigma, s.rho, s.dropout, s.confounders, s.mixing, s.feedback, s.pseudotime,
                           static_cast<int>(s.scm_kind), s.confounder_load_prob, s.pseudotime_chunks);
}

ExperimentResult score(const ExperimentSpec& spec, const Dataset& data, const AncestorMatrix& anc) {
    ExperimentResult out;
    out.spec = spec;
    const auto start = std::chrono::steady_clock::now();
    const ScoreMatrix S = run_method(spec.method, data.X, spec.seed);
    const auto stop = std::chrono::steady_clock::now();
    S.check_invariants();
    out.runtime_seconds = std::chrono::duration<double>(stop - start).count();
    out.auprc_undirected = auprc_undirected(S, data.truth);
    out.auprc_directed = auprc_directed(S, data.truth);
    out.errors = error_decomposition(S, data.truth, anc);
    out.converged = S.converged;
    return out;
}

}  // namespace

std::string_view to_string(Pathology d) {
    switch (d) {
        case Pathology::dropout: return "dropout";
        case Pathology::confounders: return "confounders";
        case Pathology::mixing: return "mixing";
        case Pathology::feedback: return "feedback";
        case Pathology::density: return "density";
        case Pathology::sample_size: return "sample_size";
        case Pathology::pseudotime: return "pseudotime";
    }
    return "unknown";
}

Pathology parse_pathology(std::string_view name) {
    for (Pathology d : kAllPathologies) {
        if (to_string(d) == name) return d;
    }
    throw Error("unknown pathology '" + std::string(name) +
                "' (valid: dropout, confounders, mixing, feedback, density, sample_size, pseudotime)");
}

const std::vector<double>& standard_levels(Pathology d) {
    switch (d) {
        case Pathology::dropout: return kDropoutLevels;
        case Pathology::confounders: return kConfounderLevels;
        case Pathology::mixing: return kMixingLevels;
        case Pathology::feedback: return kFeedbackLevels;
        case Pathology::density: return kDensityLevels;
        case Pathology::sample_size: return kSampleSizeLevels;
        case Pathology::pseudotime: return kPseudotimeLevels;
    }
    throw Error("unknown pathology");
}

bool within_standard_range(Pathology d, double level) {
    const auto& grid = standard_levels(d);
    return level >= grid.front() && level <= grid.back();
}

ScenarioConfig apply_level(ScenarioConfig base, Pathology d, double level) {
    switch (d) {
        case Pathology::dropout: base.dropout = level; break;
        case Pathology::confounders: base.confounders = integral_level(d, level); break;
        case Pathology::mixing: base.mixing = level; break;
        case Pathology::feedback: base.feedback = level; break;
        case Pathology::density: base.rho = level; break;
        case Pathology::sample_size: base.n = integral_level(d, level); break;
        case Pathology::pseudotime: base.pseudotime = level; break;
    }
    base.validate();
    return base;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    const Dataset data = generate_dataset(spec.scenario, spec.seed);
    return score(spec, data, ancestor_matrix(data.truth));
}

std::vector<ExperimentResult> run_experiments(const std::vector<ExperimentSpec>& specs, const RunOptions& opts) {
    // Work unit = one simulated dataset plus every spec that reads it.
    std::vector<std::vector<std::size_t>> units;
    {
        std::map<std::pair<decltype(scenario_tuple(ScenarioConfig{})), std::uint64_t>, std::size_t> index;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const auto key = std::make_pair(scenario_tuple(specs[i].scenario), specs[i].seed);
            const auto [it, inserted] = index.try_emplace(key, units.size());
            if (inserted) units.emplace_back();
            units[it->second].push_back(i);
        }
    }

    std::vector<ExperimentResult> results(specs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::mutex progress_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t u = next.fetch_add(1);
            if (u >= units.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            try {
                const auto& members = units[u];
                const ExperimentSpec& head = specs[members.front()];
                const Dataset data = generate_dataset(head.scenario, head.seed);
                const AncestorMatrix anc = ancestor_matrix(data.truth);
                for (std::size_t i : members) results[i] = score(specs[i], data, anc);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            if (opts.progress) {
                std::lock_guard lock(progress_mutex);
                opts.progress(finished, units.size());
            }
        }
    };

    const auto jobs = static_cast<std::size_t>(std::max(1, opts.jobs));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(jobs, units.size()); ++t) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

SweepTable run_single_dial_sweep(Pathology d, const std::vector<double>& levels, const std::vector<Method>& methods,
                                 const std::vector<std::uint64_t>& seeds, ScmKind scm, const RunOptions& opts,
                                 bool allow_extrapolation) {
    if (levels.empty() || methods.empty() || seeds.empty()) throw Error("sweep: levels, methods and seeds must be nonempty");
    std::vector<ExperimentSpec> specs;
    specs.reserve(levels.size() * methods.size() * seeds.size());
    for (double level : levels) {
        if (!allow_extrapolation && !within_standard_range(d, level)) {
            const auto& grid = standard_levels(d);
            std::ostringstream os;
            os << "level " << level << " is outside the standard range [" << grid.front() << ", " << grid.back()
               << "] of dial '" << to_string(d) << "'";
            throw Error(os.str());
        }
        ScenarioConfig base;
        base.scm_kind = scm;
        const ScenarioConfig scenario = apply_level(base, d, level);
        for (Method m : methods) {
            for (std::uint64_t seed : seeds) specs.push_back({scenario, m, seed, std::string(to_string(d)), level});
        }
    }
    return {run_experiments(specs, opts)};
}

InteractionGrid InteractionGrid::small() {
    return {{0.0, 0.8}, {0, 16}, {0.05, 0.3}};
}

SweepTable run_interaction_sweep(const InteractionGrid& grid, const std::vector<Method>& methods,
                                 const std::vector<std::uint64_t>& seeds, ScmKind scm, const RunOptions& opts) {
    if (grid.cells() == 0) throw Error("interaction sweep: every grid axis must be nonempty");
    if (methods.empty() || seeds.empty()) throw Error("interaction sweep: methods and seeds must be nonempty");
    std::vector<ExperimentSpec> specs;
    specs.reserve(grid.cells() * methods.size() * seeds.size());
    for (double dropout : grid.dropout) {
        for (int k : grid.confounders) {
            for (double rho : grid.density) {
                ScenarioConfig scenario;
                scenario.scm_kind = scm;
                scenario.dropout = dropout;
                scenario.confounders = k;
                scenario.rho = rho;
                scenario.validate();
                for (Method m : methods) {
                    for (std::uint64_t seed : seeds) {
                        specs.push_back({scenario, m, seed, std::string(kInteractionLabel), 0.0});
                    }
                }
            }
        }
    }
    return {run_experiments(specs, opts)};
}

std::vector<std::uint64_t> default_seeds(int count) {
    if (count < 1) throw Error("seed count must be positive");
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) seeds[static_cast<std::size_t>(s)] = static_cast<std::uint64_t>(s);
    return seeds;
}

}  // namespace grndiag
