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


#include <doctest.h>

#include <cmath>

#include "grndiag/harness.hpp"
#include "oracles.hpp"

using namespace grndiag;

namespace {

ExperimentResult synthetic(const std::string& pathology, double level, Method m, std::uint64_t seed, double auprc) {
    ExperimentResult r;
    r.spec.pathology = pathology;
    r.spec.level = level;
    r.spec.method = m;
    r.spec.seed = seed;
    r.auprc_undirected = auprc;
    r.auprc_directed = auprc / 2.0;
    r.errors = {1, 1, 0, 0, 2, 3, 2};
    r.runtime_seconds = 0.01;
    return r;
}

ExperimentResult cell(double dropout, int k, double rho, Method m, double auprc) {
    ExperimentResult r = synthetic(std::string(kInteractionLabel), 0.0, m, 0, auprc);
    r.spec.scenario.dropout = dropout;
    r.spec.scenario.confounders = k;
    r.spec.scenario.rho = rho;
    return r;
}

bool same_metrics(const ExperimentResult& a, const ExperimentResult& b) {
    return a.spec.method == b.spec.method && a.spec.seed == b.spec.seed && a.spec.level == b.spec.level &&
           a.auprc_undirected == b.auprc_undirected && a.auprc_directed == b.auprc_directed && a.errors == b.errors &&
           a.converged == b.converged;
}

}  // namespace

TEST_CASE("summarize: two values, one value, identical values, none") {
    const Summary two = summarize({0.5, 0.7});
    CHECK(two.mean == doctest::Approx(0.6));
    CHECK(two.sem == doctest::Approx(oracle::sem({0.5, 0.7})));
    CHECK(two.sem == doctest::Approx(0.1));
    CHECK_FALSE(two.single_replicate);

    const Summary one = summarize({0.42});
    CHECK(one.mean == 0.42);
    CHECK(one.sem == 0.0);
    CHECK(one.single_replicate);

    CHECK(summarize({0.3, 0.3, 0.3, 0.3}).sem == 0.0);
    CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("aggregate: groups by cell in first-appearance order") {
    const std::vector<ExperimentResult> rows{
        synthetic("dropout", 0.0, Method::mi, 0, 0.8),      synthetic("dropout", 0.0, Method::pearson, 0, 0.9),
        synthetic("dropout", 0.0, Method::mi, 1, 0.6),      synthetic("dropout", 0.2, Method::mi, 0, 0.5),
        synthetic("dropout", 0.0, Method::pearson, 1, 0.7),
    };
    const auto agg = aggregate(rows);
    REQUIRE(agg.size() == 3);
    CHECK(agg[0].key.method == Method::mi);
    CHECK(agg[0].key.level == 0.0);
    CHECK(agg[0].undirected.mean == doctest::Approx(0.7));
    CHECK(agg[0].undirected.sem == doctest::Approx(oracle::sem({0.8, 0.6})));
    CHECK(agg[0].directed.mean == doctest::Approx(0.35));
    CHECK(agg[0].errors.k == 6);
    CHECK(agg[0].converged_runs == 2);
    CHECK(agg[1].key.method == Method::pearson);
    CHECK(agg[2].key.level == 0.2);
    CHECK(agg[2].undirected.single_replicate);
}

TEST_CASE("delta table: constant surface gives zero deltas") {
    std::vector<ExperimentResult> rows;
    for (double level : standard_levels(Pathology::density))
        for (Method m : kAllMethods) rows.push_back(synthetic("density", level, m, 0, 0.6));
    for (const auto& d : compute_delta_table(aggregate(rows))) CHECK(d.delta == 0.0);
}

TEST_CASE("delta table: hardest minus easiest with robust and fragile flags") {
    std::vector<ExperimentResult> rows;
    const std::vector<double> drops{-0.3, -0.1, 0.05, -0.5};
    const std::vector<Method> methods{Method::pearson, Method::mi, Method::pc, Method::ges};
    for (std::size_t k = 0; k < methods.size(); ++k) {
        rows.push_back(synthetic("dropout", 0.0, methods[k], 0, 0.9));
        rows.push_back(synthetic("dropout", 0.8, methods[k], 0, 0.9 + drops[k]));
    }
    const auto table = compute_delta_table(aggregate(rows));
    REQUIRE(table.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(table[k].delta == doctest::Approx(drops[k]));
        CHECK(table[k].most_robust == (k == 2));
        CHECK(table[k].most_fragile == (k == 3));
    }
    const auto directed = compute_delta_table(aggregate(rows), Metric::directed);
    CHECK(directed[0].delta == doctest::Approx(drops[0] / 2.0));
}

TEST_CASE("delta table: missing hardest level is rejected") {
    const std::vector<ExperimentResult> rows{synthetic("dropout", 0.0, Method::mi, 0, 0.8),
                                             synthetic("dropout", 0.4, Method::mi, 0, 0.6)};
    CHECK_THROWS_AS(compute_delta_table(aggregate(rows)), Error);
}

TEST_CASE("winner map: strict argmax, and exact ties go to the smaller name") {
    const std::vector<ExperimentResult> rows{
        cell(0.0, 0, 0.05, Method::pearson, 0.7), cell(0.0, 0, 0.05, Method::notears, 0.95),
        cell(0.0, 0, 0.05, Method::ges, 0.9),     cell(0.8, 0, 0.05, Method::pearson, 0.5),
        cell(0.8, 0, 0.05, Method::ges, 0.5),     cell(0.8, 0, 0.05, Method::mi, 0.2),
    };
    const auto agg = aggregate(rows);
    const auto map = winner_map(agg);
    REQUIRE(map.size() == 2);
    CHECK(map[0].winner == Method::notears);
    CHECK_FALSE(map[0].tie);
    CHECK(map[1].winner == Method::ges);
    CHECK(map[1].tie);
    for (const auto& c : map) {
        double best = 0.0;
        for (const auto& a : agg)
            if (a.key.dropout == c.dropout && a.key.confounders == c.confounders && a.key.density == c.density)
                best = std::max(best, a.undirected.mean);
        CHECK(c.mean_auprc == best);
    }
}

TEST_CASE("interaction summary: constant surface and hand arithmetic") {
    const InteractionGrid grid = InteractionGrid::small();
    std::vector<ExperimentResult> flat, shaped;
    for (double d : grid.dropout)
        for (int k : grid.confounders)
            for (double r : grid.density) {
                flat.push_back(cell(d, k, r, Method::pearson, 0.5));
                // Additive drops 0.4, 0.2, 0.1 from a 0.9 baseline, floored at 0.3.
                const double additive = 0.9 - (d > 0 ? 0.4 : 0) - (k > 0 ? 0.2 : 0) - (r > 0.05 ? 0.1 : 0);
                shaped.push_back(cell(d, k, r, Method::mi, std::max(additive, 0.3)));
            }
    const auto zero = compute_interaction_summary(aggregate(flat), grid);
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].delta_joint == 0.0);
    CHECK(zero[0].interaction == 0.0);

    const auto s = compute_interaction_summary(aggregate(shaped), grid);
    REQUIRE(s.size() == 1);
    CHECK(s[0].auprc0 == doctest::Approx(0.9));
    CHECK(s[0].delta_d == doctest::Approx(0.4));
    CHECK(s[0].delta_k == doctest::Approx(0.2));
    CHECK(s[0].delta_rho == doctest::Approx(0.1));
    CHECK(s[0].delta_joint == doctest::Approx(0.6));
    CHECK(s[0].delta_add == s[0].delta_d + s[0].delta_k + s[0].delta_rho);
    CHECK(s[0].interaction == doctest::Approx(-0.1));
}

TEST_CASE("interaction summary: missing corner is rejected") {
    const std::vector<ExperimentResult> rows{cell(0.0, 0, 0.05, Method::mi, 0.9)};
    CHECK_THROWS_AS(compute_interaction_summary(aggregate(rows), InteractionGrid::small()), Error);
}

TEST_CASE("dial levels: names, grids, ranges and integer dials") {
    for (Pathology d : kAllPathologies) {
        CHECK(parse_pathology(to_string(d)) == d);
        CHECK(standard_levels(d).size() == 5);
        for (double level : standard_levels(d)) CHECK(within_standard_range(d, level));
    }
    CHECK_THROWS_AS(parse_pathology("batch"), Error);
    CHECK_FALSE(within_standard_range(Pathology::dropout, 0.9));
    CHECK(apply_level({}, Pathology::sample_size, 3200).n == 3200);
    CHECK(apply_level({}, Pathology::density, 0.3).rho == 0.3);
    CHECK_THROWS_AS(apply_level({}, Pathology::confounders, 2.5), Error);
}

TEST_CASE("run_experiment: deterministic metrics, positive runtime, directed below undirected") {
    ExperimentSpec spec;
    spec.method = Method::pearson;
    spec.seed = 3;
    spec.pathology = "dropout";
    const ExperimentResult a = run_experiment(spec);
    const ExperimentResult b = run_experiment(spec);
    CHECK(same_metrics(a, b));
    CHECK(a.runtime_seconds > 0.0);
    CHECK(a.auprc_directed < a.auprc_undirected);
    CHECK(a.auprc_undirected >= 0.0);
    CHECK(a.auprc_undirected <= 1.0);
}

TEST_CASE("single-dial sweep: 5 levels x 2 seeds x 6 methods gives 60 ordered rows") {
    const auto seeds = default_seeds(2);
    const auto table = run_single_dial_sweep(Pathology::mixing, standard_levels(Pathology::mixing),
                                             {kAllMethods.begin(), kAllMethods.end()}, seeds, ScmKind::linear);
    REQUIRE(table.rows.size() == 60);
    std::size_t k = 0;
    for (double level : standard_levels(Pathology::mixing))
        for (Method m : kAllMethods)
            for (std::uint64_t s : seeds) {
                const auto& r = table.rows[k++];
                CHECK(r.spec.level == level);
                CHECK(r.spec.method == m);
                CHECK(r.spec.seed == s);
                CHECK(r.spec.pathology == "mixing");
                CHECK(r.spec.scenario.mixing == level);
            }
}

TEST_CASE("single-dial sweep: parallel run matches the serial run row for row") {
    const std::vector<Method> methods{Method::pearson, Method::mi, Method::ges};
    const auto levels = standard_levels(Pathology::confounders);
    const auto serial = run_single_dial_sweep(Pathology::confounders, levels, methods, default_seeds(3), ScmKind::linear);
    RunOptions opts;
    opts.jobs = 3;
    std::size_t calls = 0;
    opts.progress = [&](std::size_t, std::size_t) { ++calls; };
    const auto parallel =
        run_single_dial_sweep(Pathology::confounders, levels, methods, default_seeds(3), ScmKind::linear, opts);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) CHECK(same_metrics(serial.rows[i], parallel.rows[i]));
    CHECK(calls == 15);  // one per simulated dataset
}

TEST_CASE("single-dial sweep: out-of-range levels need explicit extrapolation") {
    const std::vector<Method> methods{Method::pearson};
    CHECK_THROWS_AS(run_single_dial_sweep(Pathology::dropout, {0.0, 0.9}, methods, {0}, ScmKind::linear), Error);
    const auto table = run_single_dial_sweep(Pathology::dropout, {0.0, 0.9}, methods, {0}, ScmKind::linear, {}, true);
    CHECK(table.rows.size() == 2);
}

TEST_CASE("interaction sweep: 2x2x2 grid, 1 seed, 2 methods gives 16 ordered rows") {
    const InteractionGrid grid = InteractionGrid::small();
    const auto table = run_interaction_sweep(grid, {Method::pearson, Method::mi}, {0}, ScmKind::linear);
    REQUIRE(table.rows.size() == 16);
    CHECK(table.rows[0].spec.scenario.dropout == 0.0);
    CHECK(table.rows[15].spec.scenario.dropout == 0.8);
    CHECK(table.rows[15].spec.scenario.confounders == 16);
    CHECK(table.rows[15].spec.scenario.rho == 0.3);
    CHECK(table.rows[1].spec.method == Method::mi);
    CHECK(InteractionGrid{}.cells() == 64);
}

TEST_CASE("run_experiments: a failing spec surfaces its error") {
    ExperimentSpec bad;
    bad.scenario.p = 1;
    CHECK_THROWS_AS(run_experiments({bad}), Error);
    RunOptions opts;
    opts.jobs = 2;
    ExperimentSpec good;
    CHECK_THROWS_AS(run_experiments({good, bad, good}, opts), Error);
}
