#include "omvcdr/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace omvcdr {

namespace fs = std::filesystem;

int MultiViewDataset::num_classes() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end()) + 1;
}

std::size_t MultiViewDataset::min_view_dim() const {
    std::size_t d = 0;
    for (const auto& v : views) d = d == 0 ? v.rows() : std::min(d, v.rows());
    return d;
}

void validate(const MultiViewDataset& dataset) {
    auto fail = [](const std::string& msg) {
        throw DatasetError(DatasetErrorKind::invalid, msg);
    };
    if (dataset.views.empty()) fail("dataset has no views");
    const std::size_t n = dataset.num_samples();
    if (n == 0) fail("dataset has no samples");
    for (std::size_t v = 0; v < dataset.views.size(); ++v) {
        const auto& x = dataset.views[v];
        if (x.cols() != n) {
            throw DatasetError(DatasetErrorKind::column_mismatch,
                               "view " + std::to_string(v) + " has " + std::to_string(x.cols()) +
                                   " columns, expected " + std::to_string(n));
        }
        if (x.rows() == 0) fail("view " + std::to_string(v) + " has no features");
        if (!x.all_finite()) fail("view " + std::to_string(v) + " has a non-finite entry");
    }
    if (dataset.labels) {
        const auto& y = *dataset.labels;
        if (y.size() != n) fail("labels length " + std::to_string(y.size()) + " != n");
        std::vector<bool> seen;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] < 0) {
                throw DatasetError(DatasetErrorKind::label_out_of_range,
                                   "label row " + std::to_string(i) + " is negative");
            }
            if (static_cast<std::size_t>(y[i]) >= seen.size()) seen.resize(y[i] + 1);
            seen[y[i]] = true;
        }
        for (std::size_t c = 0; c < seen.size(); ++c) {
            if (!seen[c]) {
                throw DatasetError(DatasetErrorKind::label_out_of_range,
                                   "label class " + std::to_string(c) + " is empty");
            }
        }
    }
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> parse_list(std::string value) {
    value = trim(value);
    if (!value.empty() && value.front() == '[') {
        if (value.back() != ']') {
            throw DatasetError(DatasetErrorKind::malformed_manifest, "unterminated list: " + value);
        }
        value = value.substr(1, value.size() - 2);
    }
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = unquote(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::ifstream open_or_throw(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DatasetError(DatasetErrorKind::missing_file, "cannot open " + path.string());
    }
    return in;
}

MatrixD read_view_csv(const fs::path& path, std::size_t view) {
    auto in = open_or_throw(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<double> row;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (true) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            double value = 0.0;
            auto [next, ec] = std::from_chars(p, end, value);
            while (next < end && (*next == ' ' || *next == '\t')) ++next;
            if (ec != std::errc() || (next < end && *next != ',') || !std::isfinite(value)) {
                throw DatasetError(DatasetErrorKind::non_numeric,
                                   "view " + std::to_string(view) + " (" + path.string() +
                                       "), row " + std::to_string(lineno) + ", column " +
                                       std::to_string(row.size() + 1) + ": not a finite number");
            }
            row.push_back(value);
            if (next == end) break;
            p = next + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DatasetError(DatasetErrorKind::column_mismatch,
                               "view " + std::to_string(view) + ", row " + std::to_string(lineno) +
                                   " has " + std::to_string(row.size()) + " columns, expected " +
                                   std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw DatasetError(DatasetErrorKind::invalid, "view " + std::to_string(view) + " is empty");
    }
    return MatrixD::from_rows(rows);
}

std::vector<int> read_labels(const fs::path& path) {
    auto in = open_or_throw(path);
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        int value = 0;
        auto [next, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc() || next != t.data() + t.size()) {
            throw DatasetError(DatasetErrorKind::non_numeric,
                               "labels row " + std::to_string(lineno) + ": not an integer");
        }
        if (value < 0) {
            throw DatasetError(DatasetErrorKind::label_out_of_range,
                               "labels row " + std::to_string(lineno) + ": negative label");
        }
        labels.push_back(value);
    }
    return labels;
}

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace

MultiViewDataset load_dataset(const fs::path& manifest_path) {
    auto in = open_or_throw(manifest_path);
    std::map<std::string, std::string> fields;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw DatasetError(DatasetErrorKind::malformed_manifest,
                               manifest_path.string() + ":" + std::to_string(lineno) +
                                   ": expected key = value");
        }
        fields[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }

    if (!fields.contains("views")) {
        throw DatasetError(DatasetErrorKind::malformed_manifest, "manifest has no views field");
    }
    const fs::path base = manifest_path.parent_path();
    MultiViewDataset ds;
    const auto view_paths = parse_list(fields["views"]);
    if (view_paths.empty()) {
        throw DatasetError(DatasetErrorKind::malformed_manifest, "manifest lists no views");
    }
    for (std::size_t v = 0; v < view_paths.size(); ++v) {
        ds.views.push_back(read_view_csv(base / view_paths[v], v));
        if (ds.views[v].cols() != ds.views.front().cols()) {
            throw DatasetError(DatasetErrorKind::column_mismatch,
                               "view " + std::to_string(v) + " has n=" +
                                   std::to_string(ds.views[v].cols()) + ", view 0 has n=" +
                                   std::to_string(ds.views.front().cols()));
        }
    }
    if (fields.contains("n")) {
        std::size_t n = 0;
        const std::string& s = fields["n"];
        auto [next, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec != std::errc() || next != s.data() + s.size()) {
            throw DatasetError(DatasetErrorKind::malformed_manifest, "manifest n is not a count");
        }
        if (n != ds.num_samples()) {
            throw DatasetError(DatasetErrorKind::column_mismatch,
                               "manifest n=" + s + " but view 0 has n=" +
                                   std::to_string(ds.num_samples()));
        }
    }
    if (fields.contains("labels")) {
        const auto labels = read_labels(base / unquote(fields["labels"]));
        if (labels.size() != ds.num_samples()) {
            throw DatasetError(DatasetErrorKind::column_mismatch,
                               "labels file has " + std::to_string(labels.size()) +
                                   " rows, expected " + std::to_string(ds.num_samples()));
        }
        ds.labels = labels;
    }
    validate(ds);
    return ds;
}

fs::path save_dataset(const MultiViewDataset& dataset, const fs::path& dir) {
    validate(dataset);
    fs::create_directories(dir);
    std::ostringstream manifest;
    manifest << "n = " << dataset.num_samples() << "\nviews = [";
    for (std::size_t v = 0; v < dataset.views.size(); ++v) {
        const std::string name = "view" + std::to_string(v) + ".csv";
        manifest << (v ? ", " : "") << '"' << name << '"';
        std::ofstream out(dir / name, std::ios::binary);
        const auto& x = dataset.views[v];
        std::string row;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            row.clear();
            for (std::size_t c = 0; c < x.cols(); ++c) {
                if (c) row += ',';
                row += format_double(x(r, c));
            }
            row += '\n';
            out << row;
        }
    }
    manifest << "]\n";
    if (dataset.labels) {
        manifest << "labels = \"labels.csv\"\n";
        std::ofstream out(dir / "labels.csv", std::ios::binary);
        for (int y : *dataset.labels) out << y << '\n';
    }
    const fs::path path = dir / "manifest.toml";
    std::ofstream(path, std::ios::binary) << manifest.str();
    return path;
}

MultiViewDataset zscore_normalize(const MultiViewDataset& dataset) {
    MultiViewDataset out = dataset;
    for (auto& x : out.views) {
        const double n = static_cast<double>(x.cols());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            double mean = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) mean += x(r, c);
            mean /= n;
            double var = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) {
                x(r, c) -= mean;
                var += x(r, c) * x(r, c);
            }
            const double sd = std::sqrt(var / n);
            if (sd < 1e-12) continue;
            for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) /= sd;
        }
    }
    return out;
}

MatrixD concat_views(const MultiViewDataset& dataset) { return vstack(dataset.views); }

namespace {

// Gram-Schmidt on a Gaussian matrix: orthonormal columns when rows >= cols,
// orthonormal rows otherwise.
MatrixD random_orthonormal_map(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    const bool tall = rows >= cols;
    const std::size_t len = tall ? rows : cols;
    const std::size_t count = tall ? cols : rows;
    MatrixD q(len, count);
    for (double& x : q.data()) x = gauss(rng);
    for (std::size_t j = 0; j < count; ++j) {
        auto qj = q.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                auto qi = q.col(i);
                const double proj = dot(qi, qj);
                for (std::size_t r = 0; r < len; ++r) qj[r] -= proj * qi[r];
            }
        }
        const double norm = std::sqrt(squared_norm(qj));
        for (double& x : qj) x /= norm;
    }
    return tall ? q : transpose(q);
}

}  // namespace

MultiViewDataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.k < 2) throw std::invalid_argument("generate_synthetic: k must be >= 2");
    if (spec.n < static_cast<std::size_t>(spec.k)) {
        throw std::invalid_argument("generate_synthetic: n < k");
    }
    if (spec.view_dims.empty()) throw std::invalid_argument("generate_synthetic: no views");
    if (!(spec.separation >= 0.0)) {
        throw std::invalid_argument("generate_synthetic: separation must be >= 0");
    }
    if (!(spec.noise_sigma > 0.0)) {
        throw std::invalid_argument("generate_synthetic: noise_sigma must be > 0");
    }
    for (std::size_t d : spec.view_dims) {
        if (d == 0) throw std::invalid_argument("generate_synthetic: zero view dimension");
    }

    const std::size_t k = static_cast<std::size_t>(spec.k);
    const std::size_t latent = k;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss;

    // Scaled standard basis vectors: ‖e_a − e_b‖ = √2, so scale by sep/√2.
    const double scale = spec.separation / std::sqrt(2.0);

    MultiViewDataset ds;
    ds.labels = std::vector<int>(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) (*ds.labels)[i] = static_cast<int>(i % k);

    for (std::size_t d : spec.view_dims) {
        const MatrixD map = random_orthonormal_map(d, latent, rng);
        MatrixD x(d, spec.n);
        for (std::size_t i = 0; i < spec.n; ++i) {
            const std::size_t c = i % k;
            auto xi = x.col(i);
            for (std::size_t r = 0; r < d; ++r) xi[r] = scale * map(r, c) + spec.noise_sigma * gauss(rng);
        }
        ds.views.push_back(std::move(x));
    }
    return ds;
}

std::uint64_t dataset_hash(const MultiViewDataset& dataset) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    mix(dataset.views.size());
    for (const auto& x : dataset.views) {
        mix(x.rows());
        mix(x.cols());
        for (double value : x.data()) mix(std::bit_cast<std::uint64_t>(value));
    }
    if (dataset.labels) {
        mix(dataset.labels->size());
        for (int y : *dataset.labels) mix(static_cast<std::uint64_t>(y));
    }
    return h;
}

}  // namespace omvcdr
