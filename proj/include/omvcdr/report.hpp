#ifndef OMVCDR_REPORT_HPP
#define OMVCDR_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "omvcdr/dataset.hpp"
#include "omvcdr/metrics.hpp"
#include "omvcdr/solver.hpp"

namespace omvcdr {

inline constexpr int kReportSchema = 1;

/// Serializable summary of one fit.
struct RunReport {
    std::string dataset_id;
    SolverConfig config;
    std::string variant;
    bool normalized = false;
    std::optional<ClusteringScores> metrics;
    std::vector<double> objective_trace;
    std::vector<double> alpha;
    int iterations = 0;
    bool converged = false;
    bool degenerate_weights = false;
    double wall_time_seconds = 0.0;
    std::uint64_t seed = 0;
};

std::string hex_id(std::uint64_t hash);

/// Metrics are filled in when the dataset carries labels.
RunReport make_report(const FitResult& result, const MultiViewDataset& dataset,
                      double wall_time_seconds, bool normalized);

nlohmann::ordered_json to_json(const RunReport& report);

void write_labels(const std::string& path, const std::vector<int>& labels);
std::vector<int> read_label_file(const std::string& path);

}  // namespace omvcdr

#endif  // OMVCDR_REPORT_HPP
