#ifndef OMVCDR_SOLVER_HPP
#define OMVCDR_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "omvcdr/dataset.hpp"
#include "omvcdr/matrix.hpp"
#include "omvcdr/partition.hpp"

namespace omvcdr {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// full: m weighted spaces. omvc: one space. omvcdr2: two spaces.
/// equal_alpha: m spaces with α frozen at 1/m.
enum class Variant { full, omvc, omvcdr2, equal_alpha };

std::string_view to_string(Variant v) noexcept;
std::optional<Variant> parse_variant(std::string_view name) noexcept;

struct SolverConfig {
    int k = 0;
    /// Number of latent spaces.
    int m = 3;
    /// d_1..d_m. Empty means d_p = p·k, capped at the smallest view dimension.
    std::vector<std::size_t> latent_dims;
    double lambda = 1.0;
    int max_iters = 100;
    /// Stop when |Δf| < rel_tol·|f_prev|. A non-positive value runs exactly max_iters.
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    /// Cluster sums are rebuilt from scratch every this many outer iterations.
    int refresh_every = 10;
    /// Record the objective after each of the four sub-steps.
    bool track_substeps = false;
};

/**
 * Validate `config` against `dataset` and apply the variant: omvc forces
 * m = 1, omvcdr2 forces m = 2 (latent dims truncated). Fills default
 * latent dims. Capping a dimension at min_v d_v appends a warning.
 *
 * Throws ConfigError on k < 2, n < k, m < 1, λ ≤ 0 or a latent dim outside
 * [1, min_v d_v].
 */
SolverConfig resolve_config(const MultiViewDataset& dataset, SolverConfig config, Variant variant,
                            std::vector<std::string>* warnings = nullptr);

/// factors[p][v] is H_p^(v), shape d_v×d_p.
struct FactorSet {
    std::vector<std::vector<MatrixD>> factors;
};

/**
 * Consensus embeddings and their per-cluster running sums.
 *
 * embeddings[p] is Z_p (d_p×n). Column c of cluster_vec_sums[p] is
 * t_p^c = Σ_{j∈A_c} z_p^j and cluster_sq_sums[p][c] is v_p^c = Σ_{j∈A_c} ‖z_p^j‖².
 */
struct EmbeddingSet {
    std::vector<MatrixD> embeddings;
    std::vector<MatrixD> cluster_vec_sums;
    std::vector<std::vector<double>> cluster_sq_sums;
};

/// Simplex weights over the latent spaces.
struct Weights {
    std::vector<double> alpha;
};

struct SolverState {
    FactorSet factors;
    EmbeddingSet embeddings;
    Partition partition;
    Weights weights;
};

/**
 * H_p^(v) = leading identity block, Y from k-means on the stacked views,
 * α = 1/m, and Z_p = A_p / V (the column update with the clustering term
 * switched off). Expects a resolved config.
 */
SolverState init_state(const MultiViewDataset& dataset, const SolverConfig& config);

/// Called after each column update in update_embeddings with the space
/// index, the sample index and the current Z_p.
using ColumnObserver = std::function<void(std::size_t, std::size_t, const MatrixD&)>;

/// Gauss-Seidel sweep over the columns of every Z_p, keeping t and v current.
void update_embeddings(SolverState& state, const MultiViewDataset& dataset,
                       const SolverConfig& config, const ColumnObserver& observer = {});

/// H_p^(v) = S·Vᵀ from the thin SVD of X^(v)·Z_pᵀ.
void update_factors(SolverState& state, const MultiViewDataset& dataset);

/**
 * One sequential reassignment sweep over the samples using the cluster
 * sums. A sample alone in its cluster is skipped; ties go to the lowest
 * cluster index.
 */
void update_partition(SolverState& state);

/// r_p² = Tr(Yᵀ D_p Y) for every space, from the cluster sums.
std::vector<double> cluster_scatter(const SolverState& state);

/// Closed-form α_p ∝ 1/r_p². Returns true when some r_p² < 1e-12 and the
/// weight was spread uniformly over those spaces instead.
bool update_weights(SolverState& state);

/// Closed-form simplex minimizer of Σ α_p² r_p²; sets `degenerate` if the
/// limiting rule for vanishing r_p² was used.
Weights weights_from_scatter(const std::vector<double>& r_sq, bool* degenerate = nullptr);

/// Rebuild t and v exactly from the embeddings and labels.
void refresh_cluster_sums(SolverState& state);

struct ObjectiveTerms {
    double reconstruction = 0.0;   ///< Σ_p Σ_v ‖X^(v) − H_p^(v) Z_p‖²
    double weighted_scatter = 0.0; ///< Tr(Yᵀ(Σ_p α_p² D_p)Y)
    double total = 0.0;            ///< reconstruction + λ/2 · weighted_scatter
};

ObjectiveTerms objective_terms(const SolverState& state, const MultiViewDataset& dataset,
                               const SolverConfig& config);
double objective(const SolverState& state, const MultiViewDataset& dataset,
                 const SolverConfig& config);

/// Replacement sub-steps, used to run the loop against reference implementations.
struct FitHooks {
    std::function<void(SolverState&)> partition_step;
    std::function<bool(SolverState&)> weights_step;
};

struct SubstepObjectives {
    double after_embeddings = 0.0;
    double after_factors = 0.0;
    double after_partition = 0.0;
    double after_weights = 0.0;
};

struct FitResult {
    SolverState state;
    SolverConfig config;                ///< resolved
    Variant variant = Variant::full;
    double initial_objective = 0.0;
    std::vector<double> objective_trace; ///< one value per outer iteration
    std::vector<SubstepObjectives> substep_trace;
    int iterations_run = 0;
    bool converged = false;
    bool degenerate_weights = false;
    std::vector<std::string> warnings;

    const Partition& partition() const noexcept { return state.partition; }
    const Weights& weights() const noexcept { return state.weights; }
};

/// Slack allowed when comparing consecutive objective values.
double monotone_slack(double value) noexcept;

/**
 * Run the alternating optimization: embeddings, factors, partition,
 * weights, until the relative objective change drops below rel_tol or
 * max_iters is reached. Deterministic for a fixed (dataset, config, variant).
 */
FitResult fit(const MultiViewDataset& dataset, const SolverConfig& config,
              Variant variant = Variant::full, const FitHooks& hooks = {});

}  // namespace omvcdr

#endif  // OMVCDR_SOLVER_HPP
