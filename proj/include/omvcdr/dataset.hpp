#ifndef OMVCDR_DATASET_HPP
#define OMVCDR_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omvcdr/matrix.hpp"

namespace omvcdr {

/**
 * @brief V views of the same n samples.
 *
 * views[v] has shape d_v×n (one column per sample). Labels, when present,
 * are 0-based ground-truth classes with no empty class.
 */
struct MultiViewDataset {
    std::vector<MatrixD> views;
    std::optional<std::vector<int>> labels;

    std::size_t num_views() const noexcept { return views.size(); }
    std::size_t num_samples() const noexcept { return views.empty() ? 0 : views.front().cols(); }
    /// Number of distinct ground-truth classes, 0 without labels.
    int num_classes() const;
    std::size_t min_view_dim() const;
};

enum class DatasetErrorKind {
    missing_file,
    malformed_manifest,
    column_mismatch,
    non_numeric,
    label_out_of_range,
    invalid,
};

class DatasetError : public std::runtime_error {
public:
    DatasetError(DatasetErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    DatasetErrorKind kind() const noexcept { return kind_; }

private:
    DatasetErrorKind kind_;
};

/// Throws DatasetError(invalid) if any dataset invariant is broken.
void validate(const MultiViewDataset& dataset);

/**
 * Load from a manifest:
 *
 *     n = 2000
 *     views = ["view0.csv", "view1.csv"]
 *     labels = "labels.csv"
 *
 * Paths are relative to the manifest's directory. Each view CSV holds d_v
 * rows of n comma-separated numbers; the labels file holds one integer per
 * line.
 */
MultiViewDataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes `manifest.toml`, `view<v>.csv` and (if labelled) `labels.csv` into `dir`.
/// Returns the manifest path. Values are written in shortest round-trip form.
std::filesystem::path save_dataset(const MultiViewDataset& dataset,
                                   const std::filesystem::path& dir);

/// Per view, per feature row: subtract the mean, divide by the population
/// standard deviation unless it is below 1e-12.
MultiViewDataset zscore_normalize(const MultiViewDataset& dataset);

/// [X⁽¹⁾; …; X⁽ⱽ⁾]
MatrixD concat_views(const MultiViewDataset& dataset);

struct SyntheticSpec {
    std::size_t n = 500;
    int k = 5;
    std::vector<std::size_t> view_dims{20, 30};
    double separation = 10.0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;
};

/**
 * k centroids at pairwise distance exactly `separation` (scaled simplex
 * vertices in a k-dimensional latent space). Sample i belongs to cluster
 * i mod k. Each view applies its own random map with orthonormal columns
 * (or rows, when d_v < k) to the latent points and adds N(0, noise_sigma²)
 * noise. A pure function of the spec.
 */
MultiViewDataset generate_synthetic(const SyntheticSpec& spec);

/// FNV-1a over shapes, values and labels; identifies a dataset in reports.
std::uint64_t dataset_hash(const MultiViewDataset& dataset);

}  // namespace omvcdr

#endif  // OMVCDR_DATASET_HPP
