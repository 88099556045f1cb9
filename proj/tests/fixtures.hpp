#ifndef OMVCDR_TEST_FIXTURES_HPP
#define OMVCDR_TEST_FIXTURES_HPP

#include <random>

#include "omvcdr/dataset.hpp"
#include "omvcdr/solver.hpp"
#include "test_helpers.hpp"

namespace omvcdr::testing {

inline MultiViewDataset random_dataset(std::size_t n, std::vector<std::size_t> dims,
                                       std::mt19937_64& rng) {
    MultiViewDataset ds;
    for (std::size_t d : dims) ds.views.push_back(random_matrix(d, n, rng));
    return ds;
}

struct RandomState {
    MultiViewDataset dataset;
    SolverConfig config;
    SolverState state;
};

/// A state with random embeddings, random orthonormal factors, a random
/// valid partition and random simplex weights; cluster sums consistent.
inline RandomState random_state(std::size_t n, std::vector<std::size_t> dims, int k, int m,
                                double lambda, std::mt19937_64& rng) {
    RandomState rs;
    rs.dataset = random_dataset(n, std::move(dims), rng);
    SolverConfig cfg;
    cfg.k = k;
    cfg.m = m;
    cfg.lambda = lambda;
    rs.config = resolve_config(rs.dataset, cfg, Variant::full);

    SolverState& s = rs.state;
    const auto& latent = rs.config.latent_dims;
    s.factors.factors.resize(latent.size());
    for (std::size_t p = 0; p < latent.size(); ++p) {
        for (const auto& x : rs.dataset.views)
            s.factors.factors[p].push_back(random_orthonormal(x.rows(), latent[p], rng));
        s.embeddings.embeddings.push_back(random_matrix(latent[p], n, rng));
    }

    std::vector<int> labels(n);
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) : pick(rng);
    std::shuffle(labels.begin(), labels.end(), rng);
    s.partition = Partition::from_labels(labels, k);

    std::exponential_distribution<double> e(1.0);
    double total = 0.0;
    for (std::size_t p = 0; p < latent.size(); ++p) {
        s.weights.alpha.push_back(e(rng) + 0.05);
        total += s.weights.alpha.back();
    }
    for (double& a : s.weights.alpha) a /= total;

    refresh_cluster_sums(s);
    return rs;
}

/// Largest relative gap between the running cluster sums and a recomputation.
inline double cluster_sum_drift(const SolverState& state) {
    SolverState fresh = state;
    refresh_cluster_sums(fresh);
    double worst = 0.0;
    for (std::size_t p = 0; p < state.embeddings.embeddings.size(); ++p) {
        const auto& a = state.embeddings.cluster_vec_sums[p];
        const auto& b = fresh.embeddings.cluster_vec_sums[p];
        worst = std::max(worst, max_abs_diff(a, b) / (1.0 + frobenius_norm(b)));
        for (std::size_t c = 0; c < state.embeddings.cluster_sq_sums[p].size(); ++c) {
            const double x = state.embeddings.cluster_sq_sums[p][c];
            const double y = fresh.embeddings.cluster_sq_sums[p][c];
            worst = std::max(worst, std::abs(x - y) / (1.0 + std::abs(y)));
        }
    }
    return worst;
}

}  // namespace omvcdr::testing

#endif
