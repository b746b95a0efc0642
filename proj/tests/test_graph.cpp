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

#include "grndiag/graph.hpp"
#include "oracles.hpp"

using namespace grndiag;

namespace {

GroundTruthGraph chain(int p) {
    WeightMatrix w = WeightMatrix::Zero(p, p);
    for (int i = 0; i + 1 < p; ++i) w(i, i + 1) = 1.0;
    return GroundTruthGraph::from_weights(w);
}

}  // namespace

TEST_CASE("sample_dag: zero density gives an empty graph") {
    Rng rng = make_stream(1, {});
    const auto g = sample_dag(3, 0.0, rng);
    CHECK(g.edge_count() == 0);
    CHECK_FALSE(g.is_cyclic);
}

TEST_CASE("sample_dag: full density gives the complete DAG under the identity order") {
    Rng rng = make_stream(2, {});
    const auto g = sample_dag(4, 1.0, rng);
    CHECK(g.edge_count() == 6);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) CHECK(g.adjacency(i, j) == (i < j));
    }
}

TEST_CASE("sample_dag: rejects degenerate sizes and densities") {
    Rng rng = make_stream(3, {});
    CHECK_THROWS_AS(sample_dag(1, 0.1, rng), Error);
    CHECK_THROWS_AS(sample_dag(5, -0.1, rng), Error);
    CHECK_THROWS_AS(sample_dag(5, 1.5, rng), Error);
}

TEST_CASE("sample_dag: mean edge count matches the binomial expectation") {
    const int p = 25;
    const double rho = 0.1;
    const double expected = rho * p * (p - 1) / 2.0;  // 30
    double total = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        Rng rng = make_stream(s, {0xd06});
        total += sample_dag(p, rho, rng).edge_count();
    }
    CHECK(std::abs(total / 1000.0 - expected) <= 2.0);
}

TEST_CASE("sample_dag: structural invariants, magnitude range and sign balance") {
    int negative = 0, edges = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng = make_stream(s, {0x51});
        const auto g = sample_dag(25, 0.2, rng);
        CHECK_FALSE(g.is_cyclic);
        for (int k = 0; k < g.p; ++k) CHECK(g.topo_order[static_cast<std::size_t>(k)] == k);
        for (int i = 0; i < g.p; ++i) {
            CHECK_FALSE(g.adjacency(i, i));
            CHECK(g.weights(i, i) == 0.0);
            for (int j = 0; j < g.p; ++j) {
                CHECK(g.adjacency(i, j) == (g.weights(i, j) != 0.0));
                if (!g.adjacency(i, j)) continue;
                CHECK(i < j);
                const double m = std::abs(g.weights(i, j));
                CHECK(m >= 0.5);
                CHECK(m <= 1.0);
                ++edges;
                if (g.weights(i, j) < 0) ++negative;
            }
        }
        for (int j = 0; j < g.p; ++j) CHECK(g.adjacency.col(j).count() <= j);
    }
    REQUIRE(edges >= 1000);
    const double frac = static_cast<double>(negative) / edges;
    CHECK(frac >= 0.47);
    CHECK(frac <= 0.53);
}

TEST_CASE("add_feedback: zero probability leaves the graph unchanged") {
    Rng rng = make_stream(4, {});
    const auto g = sample_dag(25, 0.2, rng);
    const auto fb = add_feedback(g, 0.0, rng);
    CHECK(fb.weights == g.weights);
    CHECK(fb.adjacency == g.adjacency);
    CHECK_FALSE(fb.is_cyclic);
}

TEST_CASE("add_feedback: probability one adds one back-edge per base edge") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng = make_stream(s, {0xfb});
        const auto g = sample_dag(25, 0.1, rng);
        if (g.edge_count() == 0) continue;
        const auto fb = add_feedback(g, 1.0, rng);
        CHECK(fb.is_cyclic);
        CHECK(fb.edge_count() == 2 * g.edge_count());
        CHECK(fb.acyclic_adjacency == g.adjacency);
        CHECK(fb.acyclic_weights == g.weights);
        // Every weight carries the same rescale factor; undo it to see the
        // raw back-edge draws.
        int bi = 0, bj = 0;
        for (int i = 0; i < g.p; ++i)
            for (int j = 0; j < g.p; ++j)
                if (g.adjacency(i, j)) bi = i, bj = j;
        const double scale = fb.weights(bi, bj) / g.weights(bi, bj);
        for (int i = 0; i < g.p; ++i) {
            for (int j = 0; j < g.p; ++j) {
                if (!g.adjacency(i, j)) continue;
                const double raw = std::abs(fb.weights(j, i)) / scale;
                CHECK(raw >= 0.1 - 1e-12);
                CHECK(raw <= 0.3 + 1e-12);
            }
        }
        CHECK(spectral_radius(fb.weights) <= 0.85 + 1e-6);
    }
}

TEST_CASE("rescale: a two-cycle at radius 0.9 is scaled to 0.85") {
    WeightMatrix w(2, 2);
    w << 0.0, 0.9, 0.9, 0.0;
    // Eigenvalues of [[0, a], [b, 0]] are +-sqrt(ab).
    const double radius = std::sqrt(w(0, 1) * w(1, 0));
    CHECK(spectral_radius(w) == doctest::Approx(radius).epsilon(1e-12));
    CHECK(rescale_for_stability(w));
    CHECK(w(0, 1) == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(w(1, 0) == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(spectral_radius(w) <= 0.85 + 1e-6);
}

TEST_CASE("rescale: radius at or below the bound is left alone") {
    WeightMatrix w(2, 2);
    w << 0.0, 0.8, 0.8, 0.0;
    const WeightMatrix before = w;
    CHECK_FALSE(rescale_for_stability(w));
    CHECK(w == before);
    WeightMatrix mid(2, 2);
    mid << 0.0, 0.87, 0.87, 0.0;
    CHECK(rescale_for_stability(mid));
    CHECK(spectral_radius(mid) <= 0.85 + 1e-6);
}

TEST_CASE("spectral radius: nilpotent, symmetric 2x2 and scaled identity") {
    Rng rng = make_stream(5, {});
    CHECK(spectral_radius(sample_dag(10, 0.5, rng).weights) == doctest::Approx(0.0).epsilon(1e-12));
    WeightMatrix w(2, 2);
    w << 0.0, 0.6, 0.6, 0.0;
    CHECK(spectral_radius(w) == doctest::Approx(std::sqrt(0.36)).epsilon(1e-8));
    CHECK(spectral_radius(0.85 * WeightMatrix::Identity(3, 3)) == doctest::Approx(0.85).epsilon(1e-8));
    WeightMatrix bad = WeightMatrix::Zero(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(spectral_radius(bad), Error);
}

TEST_CASE("spectral bound holds after feedback at every standard level") {
    for (double phi : {0.1, 0.2, 0.3, 0.5, 1.0}) {
        for (std::uint64_t s = 0; s < 50; ++s) {
            Rng rng = make_stream(s, {0x5b});
            const auto g = sample_dag(25, 0.3, rng);
            const auto fb = add_feedback(g, phi, rng);
            CHECK(spectral_radius(fb.weights) <= 0.85 + 1e-6);
        }
    }
}

TEST_CASE("ancestor matrix: chain, empty graph and fork") {
    const auto anc = ancestor_matrix(chain(3));
    CHECK(anc(0, 1));
    CHECK(anc(0, 2));
    CHECK(anc(1, 2));
    CHECK(anc.reach.count() == 3);

    CHECK(ancestor_matrix(GroundTruthGraph::empty(4)).reach.count() == 0);

    WeightMatrix w = WeightMatrix::Zero(3, 3);
    w(0, 1) = 1.0;
    w(0, 2) = 1.0;
    const auto fork = ancestor_matrix(GroundTruthGraph::from_weights(w));
    CHECK(fork.reach.count() == 2);
    CHECK_FALSE(fork(1, 2));
    CHECK_FALSE(fork(2, 1));
    CHECK(fork.share_ancestor(1, 2));
    CHECK_FALSE(fork.share_ancestor(0, 1));
}

TEST_CASE("ancestor matrix equals DFS closure for every size up to 8") {
    for (int p = 1; p <= 8; ++p) {
        for (std::uint64_t s = 0; s < 100; ++s) {
            Rng rng = make_stream(s, {0xa9, static_cast<std::uint64_t>(p)});
            const auto g = GroundTruthGraph::from_weights(oracle::random_dag_weights(p, 0.4, rng));
            const auto expected = oracle::dfs_closure(g.adjacency);
            const auto anc = ancestor_matrix(g);
            for (int a = 0; a < p; ++a) {
                CHECK_FALSE(anc(a, a));
                for (int b = 0; b < p; ++b) REQUIRE(anc(a, b) == expected[a][b]);
            }
        }
    }
}

TEST_CASE("ancestor matrix reads the acyclic graph, not the feedback graph") {
    Rng rng = make_stream(6, {});
    const auto g = sample_dag(12, 0.3, rng);
    const auto fb = add_feedback(g, 1.0, rng);
    CHECK(ancestor_matrix(fb).reach == ancestor_matrix(g).reach);
}
