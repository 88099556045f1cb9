#ifndef OMVCDR_METRICS_HPP
#define OMVCDR_METRICS_HPP

#include <span>
#include <vector>

#include "omvcdr/matrix.hpp"

namespace omvcdr {

/// Counts of (truth class, predicted cluster) co-occurrences.
struct ContingencyTable {
    std::vector<std::vector<long long>> counts;  ///< [truth][predicted]
    std::vector<long long> truth_totals;
    std::vector<long long> predicted_totals;
    long long n = 0;

    std::size_t num_truth() const noexcept { return truth_totals.size(); }
    std::size_t num_predicted() const noexcept { return predicted_totals.size(); }
};

/// Labels may be any non-negative integers; distinct values are compacted to
/// 0..K-1 in increasing order. Throws std::invalid_argument on empty input,
/// unequal lengths or negative labels.
ContingencyTable contingency(std::span<const int> truth, std::span<const int> predicted);

/// Minimum-cost assignment on a cost matrix (rectangular inputs are padded
/// with zeros to square). result[row] = column. Throws std::invalid_argument
/// on non-finite entries.
std::vector<std::size_t> hungarian(const MatrixD& cost);

double accuracy(std::span<const int> truth, std::span<const int> predicted);

/// MI / max(H(truth), H(predicted)) with log base 2; 1 if both entropies are 0.
double nmi(std::span<const int> truth, std::span<const int> predicted);

double purity(std::span<const int> truth, std::span<const int> predicted);

/// Pair-counting F-measure from the contingency table; 0/0 is taken as 0.
double fscore(std::span<const int> truth, std::span<const int> predicted);

struct ClusteringScores {
    double acc = 0.0;
    double nmi = 0.0;
    double purity = 0.0;
    double fscore = 0.0;
};

ClusteringScores evaluate(std::span<const int> truth, std::span<const int> predicted);

}  // namespace omvcdr

#endif  // OMVCDR_METRICS_HPP
