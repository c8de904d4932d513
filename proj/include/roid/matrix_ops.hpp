#pragma once

#include <array>

#include "roid/tensor.hpp"
#include "roid/types.hpp"

namespace roid {

/// Singular value thresholding: U diag(max(sigma - mu, 0)) V^T.
/// Minimizes mu*||G||_* + 1/2*||m - G||_F^2 over G.
Matrix svt(const Matrix& m, double mu);

/// Polar factor U_hat V_hat^T from the thin SVD of a (rows >= cols).
/// Maximizes trace(Q^T a) over column-orthonormal Q. When a is numerically
/// rank-deficient the maximizer is non-unique; a valid factor is still
/// returned and *unique is cleared.
Matrix ort(const Matrix& a, bool* unique = nullptr);

/// Left singular vectors for the top-k singular values, orthonormal columns.
/// Column signs are fixed by making the largest-magnitude entry positive
/// (first such index on ties).
Matrix svds(const Matrix& m, Index k);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// (sum_i sigma_i^p)^(1/p); singular values below 1e-12*sigma_max count as zero.
double schatten_norm(const Matrix& m, double p);

/// sum_n weights[n] * schatten_norm(unfold(t, n), p); weights must sum to 1.
double tensor_schatten(const DenseTensor3& t, double p,
                       const std::array<double, 3>& weights = {1.0 / 3, 1.0 / 3, 1.0 / 3});

}  // namespace roid
