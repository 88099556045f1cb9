#ifndef OMVCDR_KMEANS_HPP
#define OMVCDR_KMEANS_HPP

#include <cstdint>

#include "omvcdr/matrix.hpp"
#include "omvcdr/partition.hpp"

namespace omvcdr {

struct KmeansOptions {
    int max_iterations = 300;
    int max_reseeds = 10;
};

/**
 * @brief Lloyd's k-means on the columns of `x` with k-means++ seeding.
 *
 * Runs until no assignment changes or the iteration cap is reached.
 * Assignment ties go to the lowest cluster index. If a cluster empties the
 * run is restarted from a fresh seeding (derived from `seed`), at most
 * `max_reseeds` times, after which std::runtime_error is thrown.
 *
 * Throws std::invalid_argument when there are fewer samples than clusters.
 */
Partition kmeans_lloyd(const MatrixD& x, int k, std::uint64_t seed,
                       const KmeansOptions& options = {});

/// Σ_i ‖x_i − μ_{label(i)}‖² with μ the cluster means.
double kmeans_loss(const MatrixD& x, const Partition& partition);

}  // namespace omvcdr

#endif  // OMVCDR_KMEANS_HPP
