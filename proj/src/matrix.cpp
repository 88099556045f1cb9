#include "omvcdr/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace omvcdr {

namespace {

std::string shape(const MatrixD& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require(bool ok, const char* op, const MatrixD& a, const MatrixD& b) {
    if (!ok) {
        throw DimensionError(std::string(op) + ": incompatible shapes " + shape(a) + " and " +
                             shape(b));
    }
}

}  // namespace

MatrixD::MatrixD(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

MatrixD::MatrixD(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("MatrixD: data length " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
}

MatrixD MatrixD::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    MatrixD m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) {
            throw DimensionError("MatrixD::from_rows: ragged row " + std::to_string(i));
        }
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

MatrixD MatrixD::identity(std::size_t n) {
    MatrixD m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool MatrixD::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

MatrixD transpose(const MatrixD& a) {
    MatrixD t(a.cols(), a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
    return t;
}

MatrixD matmul(const MatrixD& a, const MatrixD& b) {
    require(a.cols() == b.rows(), "matmul", a, b);
    MatrixD c(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto cj = c.col(j);
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const double s = b(l, j);
            if (s == 0.0) continue;
            auto al = a.col(l);
            for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += s * al[i];
        }
    }
    return c;
}

MatrixD matmul_at_b(const MatrixD& a, const MatrixD& b) {
    require(a.rows() == b.rows(), "matmul_at_b", a, b);
    MatrixD c(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto bj = b.col(j);
        for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = dot(a.col(i), bj);
    }
    return c;
}

MatrixD matmul_a_bt(const MatrixD& a, const MatrixD& b) {
    require(a.cols() == b.cols(), "matmul_a_bt", a, b);
    MatrixD c(a.rows(), b.rows());
    for (std::size_t l = 0; l < a.cols(); ++l) {
        auto al = a.col(l);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double s = b(j, l);
            if (s == 0.0) continue;
            auto cj = c.col(j);
            for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += s * al[i];
        }
    }
    return c;
}

MatrixD operator+(const MatrixD& a, const MatrixD& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "operator+", a, b);
    MatrixD c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
    return c;
}

MatrixD operator-(const MatrixD& a, const MatrixD& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "operator-", a, b);
    MatrixD c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
    return c;
}

MatrixD operator*(double s, const MatrixD& a) {
    MatrixD c = a;
    for (double& x : c.data()) x *= s;
    return c;
}

double frobenius_norm_sq(const MatrixD& a) { return squared_norm(a.data()); }

double frobenius_norm(const MatrixD& a) { return std::sqrt(frobenius_norm_sq(a)); }

double trace(const MatrixD& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

double orthonormality_error(const MatrixD& a) {
    const MatrixD g = matmul_at_b(a, a);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.cols(); ++j)
        for (std::size_t i = 0; i < g.rows(); ++i)
            worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

MatrixD vstack(std::span<const MatrixD> blocks) {
    if (blocks.empty()) return {};
    const std::size_t n = blocks.front().cols();
    std::size_t total = 0;
    for (const auto& b : blocks) {
        if (b.cols() != n) throw DimensionError("vstack: blocks disagree on column count");
        total += b.rows();
    }
    MatrixD out(total, n);
    for (std::size_t j = 0; j < n; ++j) {
        auto dst = out.col(j);
        std::size_t offset = 0;
        for (const auto& b : blocks) {
            auto src = b.col(j);
            std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(offset));
            offset += b.rows();
        }
    }
    return out;
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double squared_norm(std::span<const double> x) noexcept { return dot(x, x); }

double squared_distance(std::span<const double> x, std::span<const double> y) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

}  // namespace omvcdr
