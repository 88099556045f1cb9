#ifndef OMVCDR_SVD_HPP
#define OMVCDR_SVD_HPP

#include <stdexcept>
#include <vector>

#include "omvcdr/matrix.hpp"

namespace omvcdr {

/// b = left · diag(singular_values) · rightᵀ with r = min(rows, cols).
struct ThinSvd {
    MatrixD left;                        ///< rows×r, orthonormal columns
    std::vector<double> singular_values; ///< non-increasing, non-negative
    MatrixD right;                       ///< cols×r, orthonormal columns
};

class SvdError : public std::runtime_error {
public:
    SvdError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    /// Largest normalized column inner product left when the sweep cap was hit.
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct SvdOptions {
    double tolerance = 1e-12;
    int max_sweeps = 100;
};

/**
 * @brief Thin SVD by one-sided (Hestenes) Jacobi rotations.
 *
 * Sweeps visit column pairs in a fixed cyclic order, so the result is a
 * deterministic function of the input. Numerically zero singular values
 * are reported as exactly 0 and their left vectors are completed from the
 * standard basis by Gram-Schmidt.
 *
 * Throws SvdError if the off-diagonal residual is still above tolerance
 * after `max_sweeps` sweeps, and std::invalid_argument on non-finite input.
 */
ThinSvd thin_svd(const MatrixD& b, const SvdOptions& options = {});

/// Reassemble left · diag(σ) · rightᵀ.
MatrixD reconstruct(const ThinSvd& svd);

/// Orthonormal-column H maximizing Tr(Hᵀb): H = left · rightᵀ.
MatrixD procrustes_factor(const MatrixD& b);

}  // namespace omvcdr

#endif  // OMVCDR_SVD_HPP
