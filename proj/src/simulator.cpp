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

#include "grndiag/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/LU>

namespace grndiag {

namespace {

// Stream tags for generate_dataset. Each stage owns a stream so switching one
// dial on does not perturb the draws of the others.
enum StreamTag : std::uint64_t {
    kGraphStream = 1,
    kFeedbackStream = 2,
    kNoiseStream = 3,
    kConfounderStream = 4,
    kMixtureStream = 5,
    kDropoutStream = 6,
};

constexpr int kMaxFixedPointIterations = 1000;
constexpr double kFixedPointTolerance = 1e-8;
constexpr int kMaxBisectionSteps = 200;
constexpr double kCalibrationTolerance = 1e-6;

bool is_strictly_upper(const WeightMatrix& w) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = j; i < w.rows(); ++i) {
            if (w(i, j) != 0.0) return false;
        }
    }
    return true;
}

// One block of cells simulated from a single weight matrix.
ExpressionMatrix simulate_block(const WeightMatrix& w, bool cyclic, ScmKind kind,
                                const NoiseMatrix& noise) {
    if (kind == ScmKind::linear) return simulate_linear(w, noise);
    return simulate_tanh(w, cyclic, noise);
}

NoiseMatrix gather_rows(const ExpressionMatrix& eps, const std::vector<int>& rows) {
    NoiseMatrix out{ExpressionMatrix(static_cast<Eigen::Index>(rows.size()), eps.cols())};
    for (std::size_t r = 0; r < rows.size(); ++r) out.eps.row(static_cast<Eigen::Index>(r)) = eps.row(rows[r]);
    return out;
}

// Shared expression stage for the plain, mixture and pseudotime paths.
// Final row r takes noise row perm[r]; noise rows below n_primary belong to
// the primary graph, the rest to the secondary one. Pseudotime chunks follow
// the final row order.
struct ExpressionPlan {
    const GroundTruthGraph* primary = nullptr;
    const GroundTruthGraph* secondary = nullptr;
    int n_primary = 0;
    std::vector<int> perm;
    double tau = 0.0;
    int chunks = 1;
    ScmKind kind = ScmKind::linear;
};

std::vector<int> chunk_sizes(int n, int chunks) {
    std::vector<int> sizes(static_cast<std::size_t>(chunks), n / chunks);
    for (int c = 0; c < n % chunks; ++c) ++sizes[static_cast<std::size_t>(c)];
    return sizes;
}

ExpressionMatrix run_plan(const ExpressionPlan& plan, const NoiseMatrix& noise) {
    const auto n = static_cast<int>(noise.eps.rows());
    ExpressionMatrix X(noise.eps.rows(), noise.eps.cols());

    std::vector<int> chunk_of(static_cast<std::size_t>(n), 0);
    int n_chunks = 1;
    if (plan.tau > 0.0) {
        n_chunks = plan.chunks;
        int row = 0;
        const auto sizes = chunk_sizes(n, n_chunks);
        for (int c = 0; c < n_chunks; ++c) {
            for (int k = 0; k < sizes[static_cast<std::size_t>(c)]; ++k) chunk_of[static_cast<std::size_t>(row++)] = c;
        }
    }

    for (int source = 0; source < 2; ++source) {
        const GroundTruthGraph* g = source == 0 ? plan.primary : plan.secondary;
        if (g == nullptr) continue;
        for (int c = 0; c < n_chunks; ++c) {
            std::vector<int> final_rows;
            std::vector<int> noise_rows;
            for (int r = 0; r < n; ++r) {
                const int q = plan.perm[static_cast<std::size_t>(r)];
                const int src = q < plan.n_primary ? 0 : 1;
                if (src != source || chunk_of[static_cast<std::size_t>(r)] != c) continue;
                final_rows.push_back(r);
                noise_rows.push_back(q);
            }
            if (final_rows.empty()) continue;
            const double scale = plan.tau > 0.0 ? pseudotime_scale(plan.tau, c, n_chunks) : 1.0;
            const WeightMatrix w = g->weights * scale;
            const ExpressionMatrix block =
                simulate_block(w, g->is_cyclic, plan.kind, gather_rows(noise.eps, noise_rows));
            for (std::size_t k = 0; k < final_rows.size(); ++k) {
                X.row(final_rows[k]) = block.row(static_cast<Eigen::Index>(k));
            }
        }
    }
    return X;
}

std::vector<int> identity_perm(int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    return perm;
}

int secondary_count(double alpha, int n) {
    // nearbyint honours the default round-half-to-even mode.
    return static_cast<int>(std::nearbyint(alpha * n));
}

GroundTruthGraph sample_structure(const ScenarioConfig& s, Rng& graph_rng, Rng& feedback_rng) {
    GroundTruthGraph g = sample_dag(s.p, s.rho, graph_rng);
    if (s.feedback > 0.0) g = add_feedback(g, s.feedback, feedback_rng);
    return g;
}

}  // namespace

std::string_view to_string(ScmKind kind) {
    return kind == ScmKind::linear ? "linear" : "tanh";
}

ScmKind parse_scm_kind(std::string_view name) {
    if (name == "linear") return ScmKind::linear;
    if (name == "tanh") return ScmKind::tanh;
    throw Error("unknown SCM kind '" + std::string(name) + "' (valid: linear, tanh)");
}

void ScenarioConfig::validate() const {
    auto fail = [this](const std::string& what) { throw Error("invalid scenario (" + describe() + "): " + what); };
    if (p < 2) fail("p must be at least 2");
    if (n < 1) fail("n must be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail("sigma must be finite and nonnegative");
    if (!(rho >= 0.0 && rho <= 1.0)) fail("rho must lie in [0, 1]");
    if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
    if (confounders < 0) fail("confounder count must be nonnegative");
    if (!(mixing >= 0.0 && mixing <= 1.0)) fail("mixing must lie in [0, 1]");
    if (!(feedback >= 0.0 && feedback <= 1.0)) fail("feedback must lie in [0, 1]");
    if (!(pseudotime >= 0.0) || !std::isfinite(pseudotime)) fail("pseudotime drift must be nonnegative");
    if (!(confounder_load_prob >= 0.0 && confounder_load_prob <= 1.0)) fail("load probability must lie in [0, 1]");
    if (pseudotime_chunks < 1 || pseudotime_chunks > n) fail("pseudotime chunks must lie in [1, n]");
}

std::string ScenarioConfig::describe() const {
    std::ostringstream os;
    os << "p=" << p << " n=" << n << " sigma=" << sigma << " rho=" << rho << " dropout=" << dropout
       << " confounders=" << confounders << " mixing=" << mixing << " feedback=" << feedback
       << " pseudotime=" << pseudotime << " scm=" << to_string(scm_kind);
    return os.str();
}

NoiseMatrix sample_noise(int n, int p, double sigma, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    NoiseMatrix out{ExpressionMatrix(n, p)};
    // Row-major draw order: cell by cell.
    for (int c = 0; c < n; ++c) {
        for (int j = 0; j < p; ++j) out.eps(c, j) = sigma * normal(rng);
    }
    return out;
}

ExpressionMatrix simulate_linear(const WeightMatrix& w, const NoiseMatrix& noise) {
    const Eigen::Index p = w.rows();
    if (w.cols() != p || noise.eps.cols() != p) throw Error("simulate_linear: dimension mismatch");
    const WeightMatrix system = (WeightMatrix::Identity(p, p) - w).transpose();
    Eigen::PartialPivLU<WeightMatrix> lu(system);
    if (!(lu.rcond() > 1e-12)) {
        throw Error("simulate_linear: I - W is singular; the cyclic graph is unstable");
    }
    // X (I - W) = eps  <=>  (I - W)^T X^T = eps^T
    ExpressionMatrix X = lu.solve(noise.eps.transpose()).transpose();
    if (!X.allFinite()) throw Error("simulate_linear: non-finite expression values");
    return X;
}

ExpressionMatrix simulate_linear(const GroundTruthGraph& g, const NoiseMatrix& noise) {
    return simulate_linear(g.weights, noise);
}

ExpressionMatrix simulate_linear_ancestral(const WeightMatrix& w, const NoiseMatrix& noise) {
    if (!is_strictly_upper(w)) throw Error("ancestral substitution requires a strictly upper-triangular W");
    ExpressionMatrix X = noise.eps;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            if (w(i, j) != 0.0) X.col(j) += w(i, j) * X.col(i);
        }
    }
    return X;
}

ExpressionMatrix simulate_tanh(const WeightMatrix& w, bool cyclic, const NoiseMatrix& noise,
                               FixedPointReport* report) {
    const Eigen::Index p = w.rows();
    if (w.cols() != p || noise.eps.cols() != p) throw Error("simulate_tanh: dimension mismatch");

    if (!cyclic && is_strictly_upper(w)) {
        ExpressionMatrix X = noise.eps;
        for (Eigen::Index j = 0; j < p; ++j) {
            Eigen::VectorXd drive = Eigen::VectorXd::Zero(X.rows());
            bool has_parent = false;
            for (Eigen::Index i = 0; i < j; ++i) {
                if (w(i, j) == 0.0) continue;
                drive += w(i, j) * X.col(i);
                has_parent = true;
            }
            if (has_parent) X.col(j) += drive.array().tanh().matrix();
        }
        if (report != nullptr) *report = {static_cast<int>(p), 0.0};
        return X;
    }

    ExpressionMatrix X = noise.eps;
    ExpressionMatrix next(X.rows(), X.cols());
    double update = 0.0;
    for (int it = 1; it <= kMaxFixedPointIterations; ++it) {
        next.noalias() = X * w;
        next = next.array().tanh().matrix() + noise.eps;
        // `update` is the residual of X itself, so X is returned rather than
        // `next`, whose max-abs residual can exceed it when |W|_inf > 1.
        update = (next - X).cwiseAbs().maxCoeff();
        if (update <= kFixedPointTolerance) {
            if (report != nullptr) *report = {it, update};
            return X;
        }
        X.swap(next);
    }
    std::ostringstream os;
    os << "simulate_tanh: fixed-point iteration did not converge after " << kMaxFixedPointIterations
       << " sweeps (last update " << update << ", spectral norm " << spectral_norm(w) << ")";
    throw Error(os.str());
}

ExpressionMatrix simulate_tanh(const GroundTruthGraph& g, const NoiseMatrix& noise, FixedPointReport* report) {
    return simulate_tanh(g.weights, g.is_cyclic, noise, report);
}

NoiseMatrix add_confounders(const NoiseMatrix& noise, int k, double load_prob, Rng& rng,
                            Eigen::MatrixXd* loadings_out) {
    if (k < 0) throw Error("add_confounders: k must be nonnegative");
    const Eigen::Index n = noise.eps.rows();
    const Eigen::Index p = noise.eps.cols();
    if (k == 0) {
        if (loadings_out != nullptr) *loadings_out = Eigen::MatrixXd::Zero(p, 0);
        return noise;
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution keep(load_prob);

    Eigen::MatrixXd loadings(p, k);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (int f = 0; f < k; ++f) {
            const double value = normal(rng);
            loadings(j, f) = keep(rng) ? value : 0.0;
        }
    }
    Eigen::MatrixXd z(n, k);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (int f = 0; f < k; ++f) z(c, f) = normal(rng);
    }
    NoiseMatrix out{noise.eps + z * loadings.transpose()};
    if (loadings_out != nullptr) *loadings_out = std::move(loadings);
    return out;
}

double expected_dropout_rate(const ExpressionMatrix& X, double lambda) {
    const double x_min = X.minCoeff();
    return (-lambda * (X.array() - x_min)).exp().mean();
}

double calibrate_dropout(const ExpressionMatrix& X, double delta) {
    if (X.size() == 0) throw Error("calibrate_dropout: empty matrix");
    if (!(delta > 0.0 && delta < 1.0)) throw Error("calibrate_dropout: target rate must lie in (0, 1)");
    const double x_min = X.minCoeff();
    const double floor_rate =
        static_cast<double>((X.array() == x_min).count()) / static_cast<double>(X.size());
    if (delta <= floor_rate) {
        std::ostringstream os;
        os << "calibrate_dropout: rate " << delta << " is unachievable; feasible range is (" << floor_rate << ", 1)";
        throw Error(os.str());
    }

    double lo = 0.0;
    double hi = 1.0;
    while (expected_dropout_rate(X, hi) > delta) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw Error("calibrate_dropout: failed to bracket the target rate");
    }
    double mid = 0.5 * (lo + hi);
    for (int step = 0; step < kMaxBisectionSteps; ++step) {
        mid = 0.5 * (lo + hi);
        const double rate = expected_dropout_rate(X, mid);
        if (std::abs(rate - delta) <= kCalibrationTolerance) break;
        if (rate > delta) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

ExpressionMatrix apply_dropout(const ExpressionMatrix& X, double lambda, Rng& rng) {
    if (!(lambda > 0.0)) throw Error("apply_dropout: lambda must be positive");
    const double x_min = X.minCoeff();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ExpressionMatrix out = X;
    for (Eigen::Index c = 0; c < X.rows(); ++c) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double drop_prob = std::exp(-lambda * (X(c, j) - x_min));
            if (u(rng) < drop_prob) out(c, j) = 0.0;
        }
    }
    return out;
}

double pseudotime_scale(double tau, int chunk, int chunks) {
    const double t = (chunk + 0.5) / chunks;
    return 1.0 + tau * (t - 0.5);
}

Dataset simulate_mixture(const GroundTruthGraph& g1, double alpha, const ScenarioConfig& scenario, Rng& rng) {
    if (!(alpha >= 0.0 && alpha <= 0.5)) throw Error("simulate_mixture: alpha must lie in [0, 0.5]");
    Rng noise_rng = split_stream(rng, kNoiseStream);
    NoiseMatrix noise = sample_noise(scenario.n, g1.p, scenario.sigma, noise_rng);
    if (scenario.confounders > 0) {
        Rng conf_rng = split_stream(rng, kConfounderStream);
        noise = add_confounders(noise, scenario.confounders, scenario.confounder_load_prob, conf_rng);
    }

    Dataset out;
    out.truth = g1;
    out.scenario = scenario;
    out.scenario.mixing = alpha;

    ExpressionPlan plan;
    plan.primary = &g1;
    plan.kind = scenario.scm_kind;
    const int n_b = secondary_count(alpha, scenario.n);
    plan.n_primary = scenario.n - n_b;
    plan.perm = identity_perm(scenario.n);

    GroundTruthGraph g2;
    if (n_b > 0) {
        Rng graph_rng = split_stream(rng, kGraphStream);
        Rng feedback_rng = split_stream(rng, kFeedbackStream);
        ScenarioConfig second = scenario;
        second.p = g1.p;
        g2 = sample_structure(second, graph_rng, feedback_rng);
        plan.secondary = &g2;
        std::shuffle(plan.perm.begin(), plan.perm.end(), rng);
    }
    out.X = run_plan(plan, noise);
    out.row_source.resize(static_cast<std::size_t>(scenario.n));
    for (int r = 0; r < scenario.n; ++r) {
        out.row_source[static_cast<std::size_t>(r)] = plan.perm[static_cast<std::size_t>(r)] < plan.n_primary ? 0 : 1;
    }
    return out;
}

Dataset simulate_pseudotime(const GroundTruthGraph& g, double tau, const ScenarioConfig& scenario, Rng& rng) {
    if (!(tau >= 0.0)) throw Error("simulate_pseudotime: tau must be nonnegative");
    Rng noise_rng = split_stream(rng, kNoiseStream);
    NoiseMatrix noise = sample_noise(scenario.n, g.p, scenario.sigma, noise_rng);
    if (scenario.confounders > 0) {
        Rng conf_rng = split_stream(rng, kConfounderStream);
        noise = add_confounders(noise, scenario.confounders, scenario.confounder_load_prob, conf_rng);
    }
    ExpressionPlan plan;
    plan.primary = &g;
    plan.kind = scenario.scm_kind;
    plan.n_primary = scenario.n;
    plan.perm = identity_perm(scenario.n);
    plan.tau = tau;
    plan.chunks = scenario.pseudotime_chunks;

    Dataset out;
    out.X = run_plan(plan, noise);
    out.truth = g;
    out.scenario = scenario;
    out.scenario.pseudotime = tau;
    return out;
}

Dataset generate_dataset(const ScenarioConfig& scenario, std::uint64_t seed) {
    scenario.validate();
    try {
        Rng graph_rng = make_stream(seed, {kGraphStream});
        Rng feedback_rng = make_stream(seed, {kFeedbackStream});
        GroundTruthGraph g1 = sample_structure(scenario, graph_rng, feedback_rng);

        Rng noise_rng = make_stream(seed, {kNoiseStream});
        NoiseMatrix noise = sample_noise(scenario.n, scenario.p, scenario.sigma, noise_rng);
        if (scenario.confounders > 0) {
            Rng conf_rng = make_stream(seed, {kConfounderStream});
            noise = add_confounders(noise, scenario.confounders, scenario.confounder_load_prob, conf_rng);
        }

        ExpressionPlan plan;
        plan.primary = &g1;
        plan.kind = scenario.scm_kind;
        plan.n_primary = scenario.n;
        plan.perm = identity_perm(scenario.n);
        plan.tau = scenario.pseudotime;
        plan.chunks = scenario.pseudotime_chunks;

        GroundTruthGraph g2;
        const int n_b = scenario.mixing > 0.0 ? secondary_count(scenario.mixing, scenario.n) : 0;
        Rng mix_rng = make_stream(seed, {kMixtureStream});
        if (n_b > 0) {
            Rng g2_graph = split_stream(mix_rng, kGraphStream);
            Rng g2_feedback = split_stream(mix_rng, kFeedbackStream);
            g2 = sample_structure(scenario, g2_graph, g2_feedback);
            plan.secondary = &g2;
            plan.n_primary = scenario.n - n_b;
            std::shuffle(plan.perm.begin(), plan.perm.end(), mix_rng);
        }

        Dataset out;
        out.X = run_plan(plan, noise);
        if (n_b > 0) {
            out.row_source.resize(static_cast<std::size_t>(scenario.n));
            for (int r = 0; r < scenario.n; ++r) {
                out.row_source[static_cast<std::size_t>(r)] =
                    plan.perm[static_cast<std::size_t>(r)] < plan.n_primary ? 0 : 1;
            }
        }

        if (scenario.dropout > 0.0) {
            const double lambda = calibrate_dropout(out.X, scenario.dropout);
            Rng drop_rng = make_stream(seed, {kDropoutStream});
            out.X = apply_dropout(out.X, lambda, drop_rng);
        }
        if (!out.X.allFinite()) throw Error("non-finite expression values");

        out.truth = std::move(g1);
        out.scenario = scenario;
        out.seed = seed;
        return out;
    } catch (const Error& e) {
        throw Error(std::string(e.what()) + " [scenario: " + scenario.describe() + ", seed " + std::to_string(seed) + "]");
    }
}

}  // namespace grndiag
