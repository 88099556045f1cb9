#include "omvcdr/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace omvcdr {

namespace {

// k-means++ seeding; returns false if fewer than k distinct points were found.
bool seed_centroids(const MatrixD& x, std::size_t k, std::mt19937_64& rng, MatrixD& centroids) {
    const std::size_t n = x.cols();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::size_t first = pick(rng);
    std::copy(x.col(first).begin(), x.col(first).end(), centroids.col(0).begin());
    std::vector<double> closest(n);
    for (std::size_t i = 0; i < n; ++i) closest[i] = squared_distance(x.col(i), centroids.col(0));

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double d : closest) total += d;
        if (!(total > 0.0)) return false;
        const double target = unit(rng) * total;
        double running = 0.0;
        std::size_t chosen = n;
        for (std::size_t i = 0; i < n; ++i) {
            running += closest[i];
            if (closest[i] > 0.0 && running >= target) {
                chosen = i;
                break;
            }
        }
        if (chosen == n) {
            // Rounding left target just above the running sum; take the last candidate.
            for (std::size_t i = n; i-- > 0;) {
                if (closest[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        std::copy(x.col(chosen).begin(), x.col(chosen).end(), centroids.col(c).begin());
        for (std::size_t i = 0; i < n; ++i)
            closest[i] = std::min(closest[i], squared_distance(x.col(i), centroids.col(c)));
    }
    return true;
}

std::size_t nearest(std::span<const double> point, const MatrixD& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.cols(); ++c) {
        const double d = squared_distance(point, centroids.col(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

Partition kmeans_lloyd(const MatrixD& x, int k, std::uint64_t seed, const KmeansOptions& options) {
    if (k < 1) throw std::invalid_argument("kmeans_lloyd: k must be positive");
    const std::size_t n = x.cols();
    const std::size_t kk = static_cast<std::size_t>(k);
    if (n < kk) {
        throw std::invalid_argument("kmeans_lloyd: " + std::to_string(n) + " samples < k=" +
                                    std::to_string(k));
    }

    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt <= options.max_reseeds; ++attempt) {
        MatrixD centroids(x.rows(), kk);
        if (!seed_centroids(x, kk, rng, centroids)) continue;

        std::vector<int> labels(n, -1);
        bool degenerate = false;
        for (int iter = 0; iter < options.max_iterations; ++iter) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                const int c = static_cast<int>(nearest(x.col(i), centroids));
                if (c != labels[i]) {
                    labels[i] = c;
                    changed = true;
                }
            }
            if (!changed) break;

            std::vector<int> counts(kk, 0);
            std::fill(centroids.data().begin(), centroids.data().end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto c = static_cast<std::size_t>(labels[i]);
                ++counts[c];
                auto mu = centroids.col(c);
                auto xi = x.col(i);
                for (std::size_t r = 0; r < mu.size(); ++r) mu[r] += xi[r];
            }
            if (std::find(counts.begin(), counts.end(), 0) != counts.end()) {
                degenerate = true;
                break;
            }
            for (std::size_t c = 0; c < kk; ++c)
                for (double& v : centroids.col(c)) v /= counts[c];
        }
        if (degenerate) continue;
        Partition p = Partition::from_labels(std::move(labels), k);
        if (p.valid()) return p;
    }
    throw std::runtime_error("kmeans_lloyd: empty cluster persisted after " +
                             std::to_string(options.max_reseeds) + " reseeds");
}

double kmeans_loss(const MatrixD& x, const Partition& partition) {
    const std::size_t k = partition.counts.size();
    MatrixD centroids(x.rows(), k);
    for (std::size_t i = 0; i < x.cols(); ++i) {
        auto mu = centroids.col(static_cast<std::size_t>(partition.labels[i]));
        auto xi = x.col(i);
        for (std::size_t r = 0; r < mu.size(); ++r) mu[r] += xi[r];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (partition.counts[c] > 0)
            for (double& v : centroids.col(c)) v /= partition.counts[c];
    double loss = 0.0;
    for (std::size_t i = 0; i < x.cols(); ++i)
        loss += squared_distance(x.col(i), centroids.col(static_cast<std::size_t>(partition.labels[i])));
    return loss;
}

}  // namespace omvcdr
