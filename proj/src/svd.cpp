#include "omvcdr/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace omvcdr {

namespace {

// Tall case: rows >= cols.
ThinSvd jacobi_tall(const MatrixD& a, const SvdOptions& options) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    MatrixD u = a;
    MatrixD v = MatrixD::identity(n);

    double residual = 0.0;
    bool converged = n < 2;
    for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
        residual = 0.0;
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                auto ui = u.col(i);
                auto uj = u.col(j);
                const double alpha = squared_norm(ui);
                const double beta = squared_norm(uj);
                const double gamma = dot(ui, uj);
                if (alpha == 0.0 || beta == 0.0 || gamma == 0.0) continue;
                const double ratio = std::abs(gamma) / std::sqrt(alpha * beta);
                residual = std::max(residual, ratio);
                if (ratio <= options.tolerance) continue;
                rotated = true;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t r = 0; r < m; ++r) {
                    const double x = ui[r];
                    const double y = uj[r];
                    ui[r] = c * x - s * y;
                    uj[r] = s * x + c * y;
                }
                auto vi = v.col(i);
                auto vj = v.col(j);
                for (std::size_t r = 0; r < n; ++r) {
                    const double x = vi[r];
                    const double y = vj[r];
                    vi[r] = c * x - s * y;
                    vj[r] = s * x + c * y;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged) {
        throw SvdError("thin_svd: no convergence after " + std::to_string(options.max_sweeps) +
                           " sweeps, residual " + std::to_string(residual),
                       residual);
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(squared_norm(u.col(j)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    const double sigma_max = n == 0 ? 0.0 : sigma[order.front()];
    const double cutoff =
        sigma_max * static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();

    ThinSvd out{MatrixD(m, n), std::vector<double>(n), MatrixD(n, n)};
    std::vector<std::size_t> deficient;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        auto dst_right = out.right.col(k);
        auto src_right = v.col(src);
        std::copy(src_right.begin(), src_right.end(), dst_right.begin());
        if (sigma[src] > cutoff && sigma[src] > 0.0) {
            out.singular_values[k] = sigma[src];
            auto dst = out.left.col(k);
            auto col = u.col(src);
            for (std::size_t r = 0; r < m; ++r) dst[r] = col[r] / sigma[src];
        } else {
            out.singular_values[k] = 0.0;
            deficient.push_back(k);
        }
    }

    // Orthonormal completion for the null directions.
    std::vector<bool> filled(n);
    for (std::size_t k = 0; k < n; ++k) filled[k] = out.singular_values[k] > 0.0;
    std::size_t basis = 0;
    for (std::size_t k : deficient) {
        auto dst = out.left.col(k);
        while (basis < m) {
            std::fill(dst.begin(), dst.end(), 0.0);
            dst[basis++] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t q = 0; q < n; ++q) {
                    if (!filled[q]) continue;
                    auto other = out.left.col(q);
                    const double proj = dot(other, dst);
                    for (std::size_t r = 0; r < m; ++r) dst[r] -= proj * other[r];
                }
            }
            const double norm = std::sqrt(squared_norm(dst));
            if (norm > 0.5) {
                for (double& x : dst) x /= norm;
                break;
            }
        }
        filled[k] = true;
    }
    return out;
}

}  // namespace

ThinSvd thin_svd(const MatrixD& b, const SvdOptions& options) {
    if (!b.all_finite()) throw std::invalid_argument("thin_svd: non-finite entry");
    if (b.rows() >= b.cols()) return jacobi_tall(b, options);
    ThinSvd t = jacobi_tall(transpose(b), options);
    return ThinSvd{std::move(t.right), std::move(t.singular_values), std::move(t.left)};
}

MatrixD reconstruct(const ThinSvd& svd) {
    MatrixD scaled = svd.left;
    for (std::size_t k = 0; k < svd.singular_values.size(); ++k)
        for (double& x : scaled.col(k)) x *= svd.singular_values[k];
    return matmul_a_bt(scaled, svd.right);
}

MatrixD procrustes_factor(const MatrixD& b) {
    const ThinSvd svd = thin_svd(b);
    return matmul_a_bt(svd.left, svd.right);
}

}  // namespace omvcdr
