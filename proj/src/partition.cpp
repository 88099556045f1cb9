#include "omvcdr/partition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace omvcdr {

Partition Partition::from_labels(std::vector<int> labels, int k) {
    Partition p;
    p.counts.assign(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= k) {
            throw std::invalid_argument("Partition: label " + std::to_string(labels[i]) +
                                        " at sample " + std::to_string(i) + " outside [0, " +
                                        std::to_string(k) + ")");
        }
        ++p.counts[static_cast<std::size_t>(labels[i])];
    }
    p.labels = std::move(labels);
    return p;
}

bool Partition::valid() const {
    std::vector<int> recount(counts.size(), 0);
    for (int y : labels) {
        if (y < 0 || y >= num_clusters()) return false;
        ++recount[static_cast<std::size_t>(y)];
    }
    if (recount != counts) return false;
    return std::none_of(counts.begin(), counts.end(), [](int c) { return c == 0; });
}

}  // namespace omvcdr
