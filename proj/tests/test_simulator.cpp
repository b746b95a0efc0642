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
#include <filesystem>

#include "grndiag/simulator.hpp"
#include "oracles.hpp"

using namespace grndiag;

namespace {

double variance(const Eigen::VectorXd& x) {
    const double m = x.mean();
    return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

double zero_fraction(const ExpressionMatrix& X) {
    return static_cast<double>((X.array() == 0.0).count()) / static_cast<double>(X.size());
}

WeightMatrix chain_weights(int p, double w) {
    WeightMatrix out = WeightMatrix::Zero(p, p);
    for (int i = 0; i + 1 < p; ++i) out(i, i + 1) = w;
    return out;
}

}  // namespace

TEST_CASE("linear SCM: no edges returns the noise") {
    Rng rng = make_stream(1, {});
    const NoiseMatrix eps = sample_noise(200, 5, 1.0, rng);
    CHECK(simulate_linear(WeightMatrix::Zero(5, 5), eps) == eps.eps);
}

TEST_CASE("linear SCM: chain variance and correlation") {
    Rng rng = make_stream(2, {});
    const NoiseMatrix eps = sample_noise(50000, 2, 1.0, rng);
    const ExpressionMatrix X = simulate_linear(chain_weights(2, 1.0), eps);
    // X1 = X0 + e1 with unit variances: Var(X1) = 2, corr = 1 / sqrt 2.
    CHECK(std::abs(variance(X.col(1)) - 2.0) <= 0.02 * 2.0);
    CHECK(std::abs(oracle::pearson(X.col(0), X.col(1)) - 1.0 / std::sqrt(2.0)) <= 0.02);
}

TEST_CASE("linear SCM: matrix solve equals ancestral substitution") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        Rng rng = make_stream(s, {0x11});
        const WeightMatrix w = oracle::random_dag_weights(25, 0.3, rng);
        const NoiseMatrix eps = sample_noise(100, 25, 1.0, rng);
        const ExpressionMatrix a = simulate_linear(w, eps);
        const ExpressionMatrix b = simulate_linear_ancestral(w, eps);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("linear SCM: singular system is reported") {
    WeightMatrix w(2, 2);
    w << 0.0, 1.0, 1.0, 0.0;
    Rng rng = make_stream(3, {});
    CHECK_THROWS_AS(simulate_linear(w, sample_noise(10, 2, 1.0, rng)), Error);
}

TEST_CASE("tanh SCM: no edges returns the noise") {
    Rng rng = make_stream(4, {});
    const NoiseMatrix eps = sample_noise(50, 4, 1.0, rng);
    CHECK(simulate_tanh(WeightMatrix::Zero(4, 4), false, eps) == eps.eps);
}

TEST_CASE("tanh SCM: noiseless chain evaluates the activation exactly") {
    NoiseMatrix eps{ExpressionMatrix::Zero(1, 2)};
    eps.eps(0, 0) = 1.0;
    const ExpressionMatrix X = simulate_tanh(chain_weights(2, 0.8), false, eps);
    CHECK(X(0, 0) == 1.0);
    CHECK(X(0, 1) == doctest::Approx(std::tanh(0.8)).epsilon(1e-15));
    CHECK(X(0, 1) == doctest::Approx(0.6640).epsilon(1e-4));
}

TEST_CASE("tanh SCM: pre-noise activations stay inside (-1, 1)") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng = make_stream(s, {0x7a});
        const auto g = sample_dag(25, 0.3, rng);
        const NoiseMatrix eps = sample_noise(200, 25, 1.0, rng);
        const ExpressionMatrix X = simulate_tanh(g, eps);
        CHECK((X - eps.eps).cwiseAbs().maxCoeff() < 1.0);
    }
}

TEST_CASE("tanh SCM: cyclic fixed point has residual at most 1e-8") {
    WeightMatrix w(2, 2);
    w << 0.0, 0.9, 0.9, 0.0;
    rescale_for_stability(w);
    REQUIRE(spectral_norm(w) < 1.0);
    Rng rng = make_stream(5, {});
    const NoiseMatrix eps = sample_noise(100, 2, 1.0, rng);
    FixedPointReport report;
    const ExpressionMatrix X = simulate_tanh(w, true, eps, &report);
    CHECK(report.iterations <= 1000);
    const ExpressionMatrix residual = (X * w).array().tanh().matrix() + eps.eps - X;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("tanh SCM: residual bound over random feedback graphs") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng = make_stream(s, {0x7b});
        auto g = add_feedback(sample_dag(25, 0.2, rng), 0.5, rng);
        REQUIRE(g.is_cyclic);
        // The contraction guarantee needs the spectral norm, not the radius, below one.
        const double norm = spectral_norm(g.weights);
        if (norm >= 0.95) g.weights *= 0.95 / norm;
        const NoiseMatrix eps = sample_noise(100, 25, 1.0, rng);
        const ExpressionMatrix X = simulate_tanh(g, eps);
        const ExpressionMatrix residual = (X * g.weights).array().tanh().matrix() + eps.eps - X;
        CHECK(residual.cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("confounders: k = 0 is the identity") {
    Rng rng = make_stream(6, {});
    const NoiseMatrix eps = sample_noise(30, 5, 1.0, rng);
    CHECK(add_confounders(eps, 0, 0.3, rng).eps == eps.eps);
}

TEST_CASE("confounders: loading mask density") {
    Rng rng = make_stream(7, {});
    const NoiseMatrix eps{ExpressionMatrix::Zero(1, 25)};
    double nonzero = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Eigen::MatrixXd L;
        add_confounders(eps, 1, 0.3, rng, &L);
        nonzero += static_cast<double>((L.array() != 0.0).count());
    }
    const double mean = nonzero / 1000.0;  // Binomial(25, 0.3) mean 7.5
    CHECK(mean >= 7.0);
    CHECK(mean <= 8.0);
}

TEST_CASE("confounders: marginal variance adds the squared loadings") {
    Rng rng = make_stream(8, {});
    const NoiseMatrix eps = sample_noise(100000, 6, 1.0, rng);
    Eigen::MatrixXd L;
    const NoiseMatrix out = add_confounders(eps, 4, 0.3, rng, &L);
    for (int j = 0; j < 6; ++j) {
        const double expected = 1.0 + L.row(j).squaredNorm();
        CHECK(std::abs(variance(out.eps.col(j)) - expected) <= 0.05 * expected);
    }
}

TEST_CASE("dropout calibration: two-level matrix has a closed-form lambda") {
    // One entry at the minimum, the rest one unit above it:
    // rate(l) = (1 + (N - 1) e^-l) / N.
    ExpressionMatrix X = ExpressionMatrix::Constant(1000, 100, 1.0);
    X(0, 0) = 0.0;
    const double N = static_cast<double>(X.size());
    const double delta = 0.5;
    const double exact = -std::log((delta * N - 1.0) / (N - 1.0));
    const double lambda = calibrate_dropout(X, delta);
    CHECK(std::abs(expected_dropout_rate(X, lambda) - delta) <= 0.01);
    CHECK(lambda == doctest::Approx(exact).epsilon(1e-4));
    CHECK(lambda == doctest::Approx(std::log(2.0)).epsilon(1e-3));
}

TEST_CASE("dropout calibration: rejects unachievable targets") {
    ExpressionMatrix X = ExpressionMatrix::Constant(10, 10, 1.0);
    X.row(0).setZero();  // 10% of entries at the minimum
    CHECK_THROWS_AS(calibrate_dropout(X, 0.05), Error);
    CHECK_NOTHROW(calibrate_dropout(X, 0.2));
    CHECK_THROWS_AS(calibrate_dropout(X, 0.0), Error);
}

TEST_CASE("dropout calibration: within 0.01 on 20 random scenarios") {
    std::mt19937_64 pick(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        ScenarioConfig s;
        s.rho = 0.05 + 0.25 * u(pick);
        s.confounders = static_cast<int>(u(pick) * 17);
        s.feedback = u(pick) < 0.5 ? 0.0 : 0.5 * u(pick);
        s.mixing = u(pick) < 0.5 ? 0.0 : 0.5 * u(pick);
        s.scm_kind = u(pick) < 0.5 ? ScmKind::linear : ScmKind::tanh;
        const double delta = 0.05 + 0.75 * u(pick);
        const Dataset d = generate_dataset(s, static_cast<std::uint64_t>(t));
        const double lambda = calibrate_dropout(d.X, delta);
        CHECK(std::abs(expected_dropout_rate(d.X, lambda) - delta) <= 0.01);
    }
}

TEST_CASE("dropout calibration: standard levels on default scenarios") {
    const Dataset d = generate_dataset(ScenarioConfig{}, 0);
    for (double delta : {0.2, 0.4, 0.6, 0.8}) {
        const double lambda = calibrate_dropout(d.X, delta);
        CHECK(std::abs(expected_dropout_rate(d.X, lambda) - delta) <= 0.01);
    }
}

TEST_CASE("dropout: realized zero fraction tracks the calibrated rate") {
    const Dataset clean = generate_dataset(ScenarioConfig{}, 1);
    const double lambda = calibrate_dropout(clean.X, 0.8);
    Rng rng = make_stream(10, {});
    CHECK(std::abs(zero_fraction(apply_dropout(clean.X, lambda, rng)) - 0.8) <= 0.02);

    ScenarioConfig s;
    s.dropout = 0.8;
    CHECK(std::abs(zero_fraction(generate_dataset(s, 3).X) - 0.8) <= 0.02);
}

TEST_CASE("dropout: huge lambda only removes the minimum") {
    ExpressionMatrix X = ExpressionMatrix::Constant(4, 4, 2.0);
    X(1, 2) = -1.0;
    Rng rng = make_stream(11, {});
    const ExpressionMatrix out = apply_dropout(X, 1e9, rng);
    CHECK(out(1, 2) == 0.0);
    CHECK((out.array() == 0.0).count() == 1);
}

TEST_CASE("dropout: dropped sets are nested under common random numbers") {
    const Dataset d = generate_dataset(ScenarioConfig{}, 2);
    Rng r1 = make_stream(12, {});
    Rng r2 = make_stream(12, {});
    const ExpressionMatrix low = apply_dropout(d.X, 0.5, r1);
    const ExpressionMatrix high = apply_dropout(d.X, 2.0, r2);
    for (Eigen::Index i = 0; i < d.X.size(); ++i) {
        if (high.data()[i] == 0.0) CHECK(low.data()[i] == 0.0);
    }
}

TEST_CASE("mixture: secondary row counts") {
    ScenarioConfig s;
    CHECK(generate_dataset(s, 0).row_source.empty());
    s.mixing = 0.5;
    const Dataset half = generate_dataset(s, 0);
    CHECK(std::count(half.row_source.begin(), half.row_source.end(), 1) == 400);
    s.mixing = 0.25;
    const Dataset quarter = generate_dataset(s, 0);
    CHECK(std::count(quarter.row_source.begin(), quarter.row_source.end(), 1) == 200);
    CHECK(quarter.truth.weights == generate_dataset(ScenarioConfig{}, 0).truth.weights);
}

TEST_CASE("mixture: direct entry point keeps the primary graph as truth") {
    Rng rng = make_stream(13, {});
    const auto g = sample_dag(25, 0.1, rng);
    ScenarioConfig s;
    const Dataset d = simulate_mixture(g, 0.25, s, rng);
    CHECK(d.truth.weights == g.weights);
    CHECK(std::count(d.row_source.begin(), d.row_source.end(), 1) == 200);
    CHECK_THROWS_AS(simulate_mixture(g, 0.6, s, rng), Error);
}

TEST_CASE("pseudotime: chunk scales at the midpoints") {
    CHECK(pseudotime_scale(1.5, 0, 10) == doctest::Approx(0.325).epsilon(1e-14));
    CHECK(pseudotime_scale(1.5, 9, 10) == doctest::Approx(1.675).epsilon(1e-14));
    for (int c = 0; c < 10; ++c) CHECK(pseudotime_scale(0.0, c, 10) == 1.0);
}

TEST_CASE("pseudotime: each chunk solves its own scaled system") {
    // Same seed => same graph and noise. The noise is recovered from the
    // undrifted data as X (I - W); each drifted chunk must reproduce it
    // through its own scale.
    ScenarioConfig s;
    s.n = 805;  // uneven: first five chunks hold 81 rows, the rest 80
    const Dataset flat = generate_dataset(s, 4);
    s.pseudotime = 1.5;
    const Dataset drift = generate_dataset(s, 4);
    const int p = s.p;
    const WeightMatrix W = flat.truth.weights;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(p, p);
    const ExpressionMatrix eps = flat.X * (I - W);
    int row = 0;
    for (int c = 0; c < 10; ++c) {
        const int size = c < 5 ? 81 : 80;
        const double scale = 1.0 + 1.5 * ((c + 0.5) / 10.0 - 0.5);
        const ExpressionMatrix rec = drift.X.middleRows(row, size) * (I - scale * W);
        CHECK((rec - eps.middleRows(row, size)).cwiseAbs().maxCoeff() <= 1e-9);
        row += size;
    }
    CHECK(row == 805);
}

TEST_CASE("generate_dataset: deterministic and seed-distinct") {
    const ScenarioConfig s;
    CHECK(generate_dataset(s, 0).X == generate_dataset(s, 0).X);
    std::vector<ExpressionMatrix> seen;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset d = generate_dataset(s, seed);
        for (const auto& other : seen) CHECK(other != d.X);
        seen.push_back(d.X);
        CHECK(d.X.allFinite());
        CHECK(d.X.rows() == 800);
        CHECK(d.X.cols() == 25);
    }
}

TEST_CASE("generate_dataset: feedback keeps the acyclic evaluation graph") {
    ScenarioConfig s;
    s.feedback = 0.5;
    const Dataset d = generate_dataset(s, 5);
    const Dataset base = generate_dataset(ScenarioConfig{}, 5);
    CHECK(d.truth.evaluation_adjacency() == base.truth.adjacency);
}

TEST_CASE("generate_dataset: invalid scenarios are rejected") {
    ScenarioConfig s;
    s.dropout = 1.0;
    CHECK_THROWS_AS(generate_dataset(s, 0), Error);
    s = {};
    s.p = 1;
    CHECK_THROWS_AS(generate_dataset(s, 0), Error);
    s = {};
    s.confounders = -1;
    CHECK_THROWS_AS(generate_dataset(s, 0), Error);
}

TEST_CASE("dataset table round trip") {
    ScenarioConfig s;
    s.n = 40;
    const Dataset d = generate_dataset(s, 6);
    const auto stem = std::filesystem::temp_directory_path() / "grndiag_roundtrip";
    write_dataset_table(d, stem);
    const DatasetTable t = read_dataset_table(stem);
    CHECK(t.X == d.X);
    CHECK(t.weights == d.truth.acyclic_weights);
}
