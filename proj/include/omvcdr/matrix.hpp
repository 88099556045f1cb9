#ifndef OMVCDR_MATRIX_HPP
#define OMVCDR_MATRIX_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace omvcdr {

/// Raised when operand shapes do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * @brief Dense real matrix stored column-major.
 *
 * Columns are contiguous so that per-sample sweeps over a d×n embedding
 * (one column per sample) touch consecutive memory.
 */
class MatrixD {
public:
    MatrixD() = default;
    MatrixD(std::size_t rows, std::size_t cols, double fill = 0.0);

    /// Build from column-major data; `data.size()` must equal rows*cols.
    MatrixD(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Build from a row-major nested list, mostly for tests.
    static MatrixD from_rows(const std::vector<std::vector<double>>& rows);
    static MatrixD identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

    std::span<double> col(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }
    std::span<const double> col(std::size_t c) const noexcept {
        return {data_.data() + c * rows_, rows_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool all_finite() const noexcept;

    friend bool operator==(const MatrixD&, const MatrixD&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

MatrixD transpose(const MatrixD& a);

/// a·b
MatrixD matmul(const MatrixD& a, const MatrixD& b);

/// aᵀ·b without forming the transpose.
MatrixD matmul_at_b(const MatrixD& a, const MatrixD& b);

/// a·bᵀ without forming the transpose.
MatrixD matmul_a_bt(const MatrixD& a, const MatrixD& b);

MatrixD operator+(const MatrixD& a, const MatrixD& b);
MatrixD operator-(const MatrixD& a, const MatrixD& b);
MatrixD operator*(double s, const MatrixD& a);

double frobenius_norm_sq(const MatrixD& a);
double frobenius_norm(const MatrixD& a);
double trace(const MatrixD& a);

/// Largest absolute entry of aᵀa − I.
double orthonormality_error(const MatrixD& a);

/// Vertical stack; all blocks must share the column count.
MatrixD vstack(std::span<const MatrixD> blocks);

double dot(std::span<const double> x, std::span<const double> y) noexcept;
double squared_norm(std::span<const double> x) noexcept;
double squared_distance(std::span<const double> x, std::span<const double> y) noexcept;

}  // namespace omvcdr

#endif  // OMVCDR_MATRIX_HPP
