#include "omvcdr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "omvcdr/kmeans.hpp"
#include "omvcdr/svd.hpp"

namespace omvcdr {

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::full: return "full";
        case Variant::omvc: return "omvc";
        case Variant::omvcdr2: return "omvcdr2";
        case Variant::equal_alpha: return "equal_alpha";
    }
    return "full";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
    for (Variant v : {Variant::full, Variant::omvc, Variant::omvcdr2, Variant::equal_alpha})
        if (to_string(v) == name) return v;
    return std::nullopt;
}

SolverConfig resolve_config(const MultiViewDataset& dataset, SolverConfig config, Variant variant,
                            std::vector<std::string>* warnings) {
    validate(dataset);
    const std::size_t n = dataset.num_samples();
    const std::size_t min_dim = dataset.min_view_dim();
    if (config.k < 2) throw ConfigError("k must be at least 2, got " + std::to_string(config.k));
    if (n < static_cast<std::size_t>(config.k)) {
        throw ConfigError("dataset has " + std::to_string(n) + " samples, fewer than k=" +
                          std::to_string(config.k));
    }
    if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
        throw ConfigError("lambda must be positive and finite");
    }
    if (config.max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (config.refresh_every < 1) throw ConfigError("refresh_every must be at least 1");

    if (variant == Variant::omvc) config.m = 1;
    if (variant == Variant::omvcdr2) config.m = 2;
    if (config.m < 1) throw ConfigError("m must be at least 1");
    const auto m = static_cast<std::size_t>(config.m);

    if (config.latent_dims.empty()) {
        for (std::size_t p = 1; p <= m; ++p) {
            std::size_t d = p * static_cast<std::size_t>(config.k);
            if (d > min_dim) {
                if (warnings) {
                    warnings->push_back("latent dim " + std::to_string(d) + " capped at " +
                                        std::to_string(min_dim) + " (smallest view dimension)");
                }
                d = min_dim;
            }
            config.latent_dims.push_back(d);
        }
    } else {
        if (config.latent_dims.size() < m) {
            throw ConfigError("need " + std::to_string(m) + " latent dims, got " +
                              std::to_string(config.latent_dims.size()));
        }
        if (config.latent_dims.size() > m) {
            if (variant == Variant::full || variant == Variant::equal_alpha) {
                throw ConfigError("m=" + std::to_string(m) + " but " +
                                  std::to_string(config.latent_dims.size()) + " latent dims given");
            }
            config.latent_dims.resize(m);
        }
        for (std::size_t d : config.latent_dims) {
            if (d < 1 || d > min_dim) {
                throw ConfigError("latent dim " + std::to_string(d) + " outside [1, " +
                                  std::to_string(min_dim) + "]");
            }
        }
    }
    return config;
}

namespace {

// A_p = Σ_v H_p^(v)ᵀ X^(v)
MatrixD combined_projection(const SolverState& state, const MultiViewDataset& dataset,
                            std::size_t p) {
    const auto& hs = state.factors.factors[p];
    MatrixD a = matmul_at_b(hs[0], dataset.views[0]);
    for (std::size_t v = 1; v < hs.size(); ++v) a = a + matmul_at_b(hs[v], dataset.views[v]);
    return a;
}

void check_not_increasing(double before, double after, const char* stage) {
    if (after > before + monotone_slack(before)) {
        throw std::logic_error(std::string("objective increased in ") + stage + ": " +
                               std::to_string(before) + " -> " + std::to_string(after));
    }
}

#ifdef NDEBUG
constexpr bool kDebugChecks = false;
#else
constexpr bool kDebugChecks = true;
#endif

}  // namespace

SolverState init_state(const MultiViewDataset& dataset, const SolverConfig& config) {
    const std::size_t num_views = dataset.num_views();
    const std::size_t m = config.latent_dims.size();
    SolverState state;

    state.factors.factors.resize(m);
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t v = 0; v < num_views; ++v) {
            MatrixD h(dataset.views[v].rows(), config.latent_dims[p]);
            for (std::size_t d = 0; d < std::min(h.rows(), h.cols()); ++d) h(d, d) = 1.0;
            state.factors.factors[p].push_back(std::move(h));
        }
    }

    try {
        state.partition = kmeans_lloyd(concat_views(dataset), config.k, config.seed);
    } catch (const std::runtime_error& e) {
        throw SolverError(std::string("initial partition: ") + e.what());
    }

    state.weights.alpha.assign(m, 1.0 / static_cast<double>(m));

    const double inv_views = 1.0 / static_cast<double>(num_views);
    for (std::size_t p = 0; p < m; ++p)
        state.embeddings.embeddings.push_back(inv_views * combined_projection(state, dataset, p));
    refresh_cluster_sums(state);
    return state;
}

void update_embeddings(SolverState& state, const MultiViewDataset& dataset,
                       const SolverConfig& config, const ColumnObserver& observer) {
    const double num_views = static_cast<double>(dataset.num_views());
    const auto& labels = state.partition.labels;
    const auto& counts = state.partition.counts;
    auto& emb = state.embeddings;

    for (std::size_t p = 0; p < emb.embeddings.size(); ++p) {
        const MatrixD a = combined_projection(state, dataset, p);
        const double alpha = state.weights.alpha[p];
        const double w = config.lambda * alpha * alpha;
        MatrixD& z = emb.embeddings[p];
        MatrixD& sums = emb.cluster_vec_sums[p];
        auto& sq = emb.cluster_sq_sums[p];
        std::vector<double> fresh(z.rows());

        for (std::size_t i = 0; i < z.cols(); ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            if (counts[c] < 1) throw std::logic_error("update_embeddings: empty cluster");
            const double denom = num_views + w * static_cast<double>(counts[c] - 1);
            auto zi = z.col(i);
            auto ai = a.col(i);
            auto tc = sums.col(c);
            for (std::size_t r = 0; r < zi.size(); ++r)
                fresh[r] = (ai[r] + w * (tc[r] - zi[r])) / denom;

            const double old_sq = squared_norm(zi);
            for (std::size_t r = 0; r < zi.size(); ++r) {
                tc[r] += fresh[r] - zi[r];
                zi[r] = fresh[r];
            }
            sq[c] += squared_norm(zi) - old_sq;
            if (observer) observer(p, i, z);
        }
    }
}

void update_factors(SolverState& state, const MultiViewDataset& dataset) {
    auto& factors = state.factors.factors;
    for (std::size_t p = 0; p < factors.size(); ++p) {
        const MatrixD& z = state.embeddings.embeddings[p];
        for (std::size_t v = 0; v < factors[p].size(); ++v)
            factors[p][v] = procrustes_factor(matmul_a_bt(dataset.views[v], z));
    }
}

void update_partition(SolverState& state) {
    auto& labels = state.partition.labels;
    auto& counts = state.partition.counts;
    auto& emb = state.embeddings;
    const std::size_t m = emb.embeddings.size();
    const std::size_t k = counts.size();
    const std::size_t n = labels.size();

    std::vector<double> weight(m);
    for (std::size_t p = 0; p < m; ++p) weight[p] = state.weights.alpha[p] * state.weights.alpha[p];

    std::vector<double> norm_sq(m);
    std::vector<std::vector<double>> saved_sums(m);
    std::vector<double> saved_sq(m);
    std::vector<double> cost(k);

    for (std::size_t i = 0; i < n; ++i) {
        const auto home = static_cast<std::size_t>(labels[i]);
        if (counts[home] <= 1) continue;

        for (std::size_t p = 0; p < m; ++p) {
            auto zi = emb.embeddings[p].col(i);
            auto t = emb.cluster_vec_sums[p].col(home);
            norm_sq[p] = squared_norm(zi);
            saved_sums[p].assign(t.begin(), t.end());
            saved_sq[p] = emb.cluster_sq_sums[p][home];
            for (std::size_t r = 0; r < t.size(); ++r) t[r] -= zi[r];
            emb.cluster_sq_sums[p][home] -= norm_sq[p];
        }
        --counts[home];

        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t p = 0; p < m; ++p) {
            auto zi = emb.embeddings[p].col(i);
            const MatrixD& sums = emb.cluster_vec_sums[p];
            const auto& sq = emb.cluster_sq_sums[p];
            for (std::size_t c = 0; c < k; ++c) {
                cost[c] += weight[p] * (static_cast<double>(counts[c]) * norm_sq[p] -
                                        2.0 * dot(zi, sums.col(c)) + sq[c]);
            }
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (cost[c] < cost[best]) best = c;

        ++counts[best];
        labels[i] = static_cast<int>(best);
        for (std::size_t p = 0; p < m; ++p) {
            auto t = emb.cluster_vec_sums[p].col(best);
            if (best == home) {
                std::copy(saved_sums[p].begin(), saved_sums[p].end(), t.begin());
                emb.cluster_sq_sums[p][best] = saved_sq[p];
            } else {
                auto zi = emb.embeddings[p].col(i);
                for (std::size_t r = 0; r < t.size(); ++r) t[r] += zi[r];
                emb.cluster_sq_sums[p][best] += norm_sq[p];
            }
        }
    }
}

std::vector<double> cluster_scatter(const SolverState& state) {
    const auto& labels = state.partition.labels;
    const auto& counts = state.partition.counts;
    const auto& emb = state.embeddings;
    std::vector<double> r_sq(emb.embeddings.size(), 0.0);

    // Σ_{i,j∈A_c} ‖z_i − z_j‖² = 2|A_c| Σ_{i∈A_c} ‖z_i − t_c/|A_c|‖²; the centred form
    // avoids the cancellation in 2(|A_c| v_c − ‖t_c‖²).
    for (std::size_t p = 0; p < r_sq.size(); ++p) {
        const MatrixD& z = emb.embeddings[p];
        MatrixD centroids = emb.cluster_vec_sums[p];
        for (std::size_t c = 0; c < counts.size(); ++c)
            for (double& x : centroids.col(c)) x /= static_cast<double>(counts[c]);
        double total = 0.0;
        for (std::size_t i = 0; i < z.cols(); ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            total += 2.0 * static_cast<double>(counts[c]) * squared_distance(z.col(i), centroids.col(c));
        }
        r_sq[p] = total;
    }
    return r_sq;
}

Weights weights_from_scatter(const std::vector<double>& r_sq, bool* degenerate) {
    constexpr double kVanishing = 1e-12;
    Weights w;
    w.alpha.assign(r_sq.size(), 0.0);
    const auto tiny = static_cast<std::size_t>(
        std::count_if(r_sq.begin(), r_sq.end(), [](double r) { return r < kVanishing; }));
    if (degenerate) *degenerate = tiny > 0;
    if (tiny > 0) {
        for (std::size_t p = 0; p < r_sq.size(); ++p)
            if (r_sq[p] < kVanishing) w.alpha[p] = 1.0 / static_cast<double>(tiny);
        return w;
    }
    double total = 0.0;
    for (double r : r_sq) total += 1.0 / r;
    for (std::size_t p = 0; p < r_sq.size(); ++p) w.alpha[p] = (1.0 / r_sq[p]) / total;
    return w;
}

bool update_weights(SolverState& state) {
    bool degenerate = false;
    state.weights = weights_from_scatter(cluster_scatter(state), &degenerate);
    return degenerate;
}

void refresh_cluster_sums(SolverState& state) {
    auto& emb = state.embeddings;
    const std::size_t k = state.partition.counts.size();
    const auto& labels = state.partition.labels;
    emb.cluster_vec_sums.clear();
    emb.cluster_sq_sums.clear();
    for (const MatrixD& z : emb.embeddings) {
        MatrixD sums(z.rows(), k);
        std::vector<double> sq(k, 0.0);
        for (std::size_t i = 0; i < z.cols(); ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            auto zi = z.col(i);
            auto t = sums.col(c);
            for (std::size_t r = 0; r < zi.size(); ++r) t[r] += zi[r];
            sq[c] += squared_norm(zi);
        }
        emb.cluster_vec_sums.push_back(std::move(sums));
        emb.cluster_sq_sums.push_back(std::move(sq));
    }
}

ObjectiveTerms objective_terms(const SolverState& state, const MultiViewDataset& dataset,
                               const SolverConfig& config) {
    ObjectiveTerms terms;
    const auto& emb = state.embeddings.embeddings;
    std::vector<double> residual;
    for (std::size_t p = 0; p < emb.size(); ++p) {
        const MatrixD& z = emb[p];
        for (std::size_t v = 0; v < dataset.num_views(); ++v) {
            const MatrixD& x = dataset.views[v];
            const MatrixD& h = state.factors.factors[p][v];
            residual.resize(x.rows());
            for (std::size_t i = 0; i < x.cols(); ++i) {
                auto xi = x.col(i);
                std::copy(xi.begin(), xi.end(), residual.begin());
                for (std::size_t l = 0; l < h.cols(); ++l) {
                    const double s = z(l, i);
                    auto hl = h.col(l);
                    for (std::size_t r = 0; r < residual.size(); ++r) residual[r] -= s * hl[r];
                }
                terms.reconstruction += squared_norm(residual);
            }
        }
    }

    // Scatter from freshly accumulated cluster means, independent of the running sums.
    SolverState fresh;
    fresh.partition = state.partition;
    fresh.embeddings.embeddings = emb;
    refresh_cluster_sums(fresh);
    const auto r_sq = cluster_scatter(fresh);
    for (std::size_t p = 0; p < r_sq.size(); ++p) {
        const double a = state.weights.alpha[p];
        terms.weighted_scatter += a * a * r_sq[p];
    }
    terms.total = terms.reconstruction + 0.5 * config.lambda * terms.weighted_scatter;
    return terms;
}

double objective(const SolverState& state, const MultiViewDataset& dataset,
                 const SolverConfig& config) {
    return objective_terms(state, dataset, config).total;
}

double monotone_slack(double value) noexcept { return 1e-8 * (1.0 + std::abs(value)); }

FitResult fit(const MultiViewDataset& dataset, const SolverConfig& config, Variant variant,
              const FitHooks& hooks) {
    FitResult result;
    result.variant = variant;
    result.config = resolve_config(dataset, config, variant, &result.warnings);
    const SolverConfig& cfg = result.config;

    result.state = init_state(dataset, cfg);
    SolverState& state = result.state;

    const bool track = cfg.track_substeps || kDebugChecks;
    double previous = objective(state, dataset, cfg);
    result.initial_objective = previous;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        SubstepObjectives sub;
        double last = previous;
        auto checkpoint = [&](double& slot, const char* stage) {
            if (!track) return;
            slot = objective(state, dataset, cfg);
            if (kDebugChecks) check_not_increasing(last, slot, stage);
            last = slot;
        };

        update_embeddings(state, dataset, cfg);
        checkpoint(sub.after_embeddings, "embedding step");

        update_factors(state, dataset);
        checkpoint(sub.after_factors, "factor step");

        if (hooks.partition_step) {
            hooks.partition_step(state);
            refresh_cluster_sums(state);
        } else {
            update_partition(state);
        }
        if (kDebugChecks && !state.partition.valid())
            throw std::logic_error("partition step produced an invalid partition");
        checkpoint(sub.after_partition, "partition step");

        if (variant != Variant::equal_alpha) {
            const bool degenerate =
                hooks.weights_step ? hooks.weights_step(state) : update_weights(state);
            result.degenerate_weights = result.degenerate_weights || degenerate;
        }

        const double current = objective(state, dataset, cfg);
        sub.after_weights = current;
        if (kDebugChecks) check_not_increasing(last, current, "weight step");
        if (cfg.track_substeps) result.substep_trace.push_back(sub);
        result.objective_trace.push_back(current);
        result.iterations_run = iter + 1;

        if ((iter + 1) % cfg.refresh_every == 0) refresh_cluster_sums(state);

        if (cfg.rel_tol > 0.0 && std::abs(previous - current) <= cfg.rel_tol * std::abs(previous)) {
            result.converged = true;
            break;
        }
        previous = current;
    }
    return result;
}

}  // namespace omvcdr
