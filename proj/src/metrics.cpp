#include "omvcdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace omvcdr {

namespace {

std::vector<std::size_t> compact(std::span<const int> labels, std::size_t& classes) {
    std::map<int, std::size_t> index;
    for (int y : labels) {
        if (y < 0) throw std::invalid_argument("negative label " + std::to_string(y));
        index.emplace(y, 0);
    }
    std::size_t next = 0;
    for (auto& [value, slot] : index) slot = next++;
    classes = next;
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = index[labels[i]];
    return out;
}

double choose2(long long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

}  // namespace

ContingencyTable contingency(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.empty()) throw std::invalid_argument("contingency: empty labelings");
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("contingency: label vectors differ in length");
    }
    std::size_t kt = 0;
    std::size_t kp = 0;
    const auto t = compact(truth, kt);
    const auto p = compact(predicted, kp);
    ContingencyTable table;
    table.counts.assign(kt, std::vector<long long>(kp, 0));
    table.truth_totals.assign(kt, 0);
    table.predicted_totals.assign(kp, 0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        ++table.counts[t[i]][p[i]];
        ++table.truth_totals[t[i]];
        ++table.predicted_totals[p[i]];
    }
    table.n = static_cast<long long>(truth.size());
    return table;
}

std::vector<std::size_t> hungarian(const MatrixD& cost) {
    if (!cost.all_finite()) throw std::invalid_argument("hungarian: non-finite cost");
    const std::size_t n = std::max(cost.rows(), cost.cols());
    if (n == 0) return {};
    auto at = [&](std::size_t i, std::size_t j) {
        return i < cost.rows() && j < cost.cols() ? cost(i, j) : 0.0;
    };

    // Shortest augmenting paths with row/column potentials; 1-based, slot 0 is a sentinel.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
    return assignment;
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
    const ContingencyTable table = contingency(truth, predicted);
    const std::size_t size = std::max(table.num_truth(), table.num_predicted());
    MatrixD cost(size, size);
    for (std::size_t a = 0; a < table.num_truth(); ++a)
        for (std::size_t b = 0; b < table.num_predicted(); ++b)
            cost(a, b) = -static_cast<double>(table.counts[a][b]);
    const auto assignment = hungarian(cost);
    long long correct = 0;
    for (std::size_t a = 0; a < table.num_truth(); ++a)
        if (assignment[a] < table.num_predicted()) correct += table.counts[a][assignment[a]];
    return static_cast<double>(correct) / static_cast<double>(table.n);
}

double nmi(std::span<const int> truth, std::span<const int> predicted) {
    const ContingencyTable table = contingency(truth, predicted);
    const double n = static_cast<double>(table.n);
    auto entropy = [n](const std::vector<long long>& totals) {
        double h = 0.0;
        for (long long c : totals) {
            if (c == 0) continue;
            const double q = static_cast<double>(c) / n;
            h -= q * std::log2(q);
        }
        return h;
    };
    const double ht = entropy(table.truth_totals);
    const double hp = entropy(table.predicted_totals);
    const double denom = std::max(ht, hp);
    if (denom <= 0.0) return 1.0;

    double mi = 0.0;
    for (std::size_t a = 0; a < table.num_truth(); ++a) {
        for (std::size_t b = 0; b < table.num_predicted(); ++b) {
            const long long c = table.counts[a][b];
            if (c == 0) continue;
            const double joint = static_cast<double>(c) / n;
            const double ratio = static_cast<double>(c) * n /
                                 (static_cast<double>(table.truth_totals[a]) *
                                  static_cast<double>(table.predicted_totals[b]));
            mi += joint * std::log2(ratio);
        }
    }
    return std::clamp(mi / denom, 0.0, 1.0);
}

double purity(std::span<const int> truth, std::span<const int> predicted) {
    const ContingencyTable table = contingency(truth, predicted);
    long long total = 0;
    for (std::size_t b = 0; b < table.num_predicted(); ++b) {
        long long best = 0;
        for (std::size_t a = 0; a < table.num_truth(); ++a) best = std::max(best, table.counts[a][b]);
        total += best;
    }
    return static_cast<double>(total) / static_cast<double>(table.n);
}

double fscore(std::span<const int> truth, std::span<const int> predicted) {
    const ContingencyTable table = contingency(truth, predicted);
    double together_both = 0.0;
    for (const auto& row : table.counts)
        for (long long c : row) together_both += choose2(c);
    double together_pred = 0.0;
    for (long long c : table.predicted_totals) together_pred += choose2(c);
    double together_truth = 0.0;
    for (long long c : table.truth_totals) together_truth += choose2(c);

    const double precision = together_pred > 0.0 ? together_both / together_pred : 0.0;
    const double recall = together_truth > 0.0 ? together_both / together_truth : 0.0;
    if (precision + recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

ClusteringScores evaluate(std::span<const int> truth, std::span<const int> predicted) {
    return {accuracy(truth, predicted), nmi(truth, predicted), purity(truth, predicted),
            fscore(truth, predicted)};
}

}  // namespace omvcdr
