#ifndef OMVCDR_PARTITION_HPP
#define OMVCDR_PARTITION_HPP

#include <vector>

namespace omvcdr {

/// Hard assignment of n samples to k nonempty clusters.
struct Partition {
    std::vector<int> labels;  ///< length n, values in [0, k)
    std::vector<int> counts;  ///< length k

    int num_clusters() const noexcept { return static_cast<int>(counts.size()); }

    /// Build counts from labels; throws std::invalid_argument on a label
    /// outside [0, k).
    static Partition from_labels(std::vector<int> labels, int k);

    /// counts match labels and no cluster is empty.
    bool valid() const;

    friend bool operator==(const Partition&, const Partition&) = default;
};

}  // namespace omvcdr

#endif  // OMVCDR_PARTITION_HPP
