#include "omvcdr/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace omvcdr {

std::string hex_id(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

RunReport make_report(const FitResult& result, const MultiViewDataset& dataset,
                      double wall_time_seconds, bool normalized) {
    RunReport r;
    r.dataset_id = hex_id(dataset_hash(dataset));
    r.config = result.config;
    r.variant = std::string(to_string(result.variant));
    r.normalized = normalized;
    if (dataset.labels) r.metrics = evaluate(*dataset.labels, result.partition().labels);
    r.objective_trace = result.objective_trace;
    r.alpha = result.weights().alpha;
    r.iterations = result.iterations_run;
    r.converged = result.converged;
    r.degenerate_weights = result.degenerate_weights;
    r.wall_time_seconds = wall_time_seconds;
    r.seed = result.config.seed;
    return r;
}

nlohmann::ordered_json to_json(const RunReport& report) {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["dataset_id"] = report.dataset_id;
    j["variant"] = report.variant;
    j["config"] = {
        {"k", report.config.k},
        {"m", report.config.m},
        {"latent_dims", report.config.latent_dims},
        {"lambda", report.config.lambda},
        {"max_iters", report.config.max_iters},
        {"rel_tol", report.config.rel_tol},
        {"seed", report.config.seed},
        {"normalize", report.normalized},
    };
    if (report.metrics) {
        j["metrics"] = {{"acc", report.metrics->acc},
                        {"nmi", report.metrics->nmi},
                        {"purity", report.metrics->purity},
                        {"fscore", report.metrics->fscore}};
    }
    j["alpha"] = report.alpha;
    j["objective_trace"] = report.objective_trace;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["degenerate_weights"] = report.degenerate_weights;
    j["seed"] = report.seed;
    j["wall_time_seconds"] = report.wall_time_seconds;
    return j;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int y : labels) out << y << '\n';
}

std::vector<int> read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError(DatasetErrorKind::missing_file, "cannot open " + path);
    std::vector<int> labels;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            const int y = std::stoi(line, &used);
            if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(line);
            labels.push_back(y);
        } catch (const std::logic_error&) {
            throw DatasetError(DatasetErrorKind::non_numeric,
                               path + " row " + std::to_string(row) + ": not an integer");
        }
    }
    return labels;
}

}  // namespace omvcdr
